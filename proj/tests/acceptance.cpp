// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
//
//   acceptance [WORK_DIR]
//
// WORK_DIR receives the full-scale pipeline runs used by criteria 8 and 9.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "ldist/ldist.hpp"
#include "oracles.hpp"

using namespace ldist;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
        r = body();
    } catch (const std::exception& e) {
        r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!r.pass) ++failures;
    std::printf("[%s] %2d %-34s %8.2fs  %s\n", r.pass ? "PASS" : "FAIL", id, name.c_str(), secs, r.detail.c_str());
    std::fflush(stdout);
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct RandomPair {
    oracle::Row a, b, c;
};

RandomPair random_triple(std::mt19937_64& rng) {
    const std::size_t k = 1 + rng() % 20;
    const std::size_t classes = 2 + rng() % 9;
    std::uint64_t s = rng();
    return {oracle::random_row(s, k, classes), oracle::random_row(s, k, classes), oracle::random_row(s, k, classes)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// Central-difference gradient check on a small network.
using Small = Mlp<3, 5, 4>;

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "ldist_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);

    criterion(1, "pseudo-metric axioms (d_L)", [] {
        const auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 rng(1);
        for (int t = 0; t < 10'000; ++t) {
            const auto [a, b, c] = random_triple(rng);
            if (d_longitudinal(a, a) != 0.0) return Outcome{false, "d(x,x) != 0"};
            if (d_longitudinal(a, b) != d_longitudinal(b, a)) return Outcome{false, "asymmetric"};
            if (d_longitudinal(a, c) > d_longitudinal(a, b) + d_longitudinal(b, c) + 1e-12)
                return Outcome{false, "triangle inequality violated"};
        }
        const double s = elapsed_since(t0);
        return Outcome{s < 5.0, "10000 triples, " + fmt(s) + "s (limit 5s)"};
    });

    criterion(2, "d_L == mismatches / k", [] {
        std::mt19937_64 rng(2);
        for (int t = 0; t < 10'000; ++t) {
            const auto p = random_triple(rng);
            if (d_longitudinal(p.a, p.b) != oracle::mismatch_fraction(p.a, p.b))
                return Outcome{false, "mismatch at pair " + std::to_string(t)};
        }
        return Outcome{true, "10000 pairs, bit-exact"};
    });

    criterion(3, "d_L + d_negative == 1", [] {
        std::mt19937_64 rng(3);
        for (int t = 0; t < 10'000; ++t) {
            const auto p = random_triple(rng);
            if (d_longitudinal(p.a, p.b) + d_negative(p.a, p.b) != 1.0)
                return Outcome{false, "sum != 1 at pair " + std::to_string(t)};
        }
        return Outcome{true, "10000 pairs, exact"};
    });

    criterion(4, "d_SL properties and asymmetry", [] {
        std::mt19937_64 rng(4);
        for (int t = 0; t < 10'000; ++t) {
            const auto p = random_triple(rng);
            const std::vector<std::uint8_t> ones(p.a.size(), 1);
            if (d_strict(p.a, ones, p.b).value != d_longitudinal(p.a, p.b))
                return Outcome{false, "w=1 does not reduce to d_L"};
            std::vector<std::uint8_t> w(p.a.size());
            for (auto& v : w) v = rng() & 1;
            const auto self = d_strict(p.a, w, p.a);
            if (!self.zero_weight_sum && self.value != 0.0) return Outcome{false, "d_SL(x,x) != 0"};
        }
        const std::vector<Label> A{0, 1}, B{0, 0};
        const std::vector<std::uint8_t> wA{1, 0}, wB{1, 1};
        const double ab = d_strict(A, wA, B).value, ba = d_strict(B, wB, A).value;
        return Outcome{ab == 0.0 && ba == 0.5, "witness d(A,B)=" + fmt(ab) + " d(B,A)=" + fmt(ba)};
    });

    criterion(5, "batched distances == naive loop", [] {
        const auto t0 = std::chrono::steady_clock::now();
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            std::uint64_t s = seed * 977;
            std::vector<std::vector<long long>> grid;
            std::vector<long long> truth;
            std::vector<oracle::Row> rows;
            for (int i = 0; i < 200; ++i) {
                rows.push_back(oracle::random_row(s, 15, 10));
                grid.emplace_back(rows.back().begin(), rows.back().end());
                truth.push_back(static_cast<long long>(oracle::random_below(s, 10)));
            }
            const auto train = build_trace(grid, truth, 10);
            for (int t = 0; t < 50; ++t) {
                const auto target = oracle::random_row(s, 15, 10);
                for (auto kind : {DistanceKind::Longitudinal, DistanceKind::StrictLongitudinal}) {
                    const auto dv = distances_to_all(train, target, kind, Polarity::Positive, 0, default_workers());
                    for (std::size_t i = 0; i < 200; ++i) {
                        const double want = kind == DistanceKind::Longitudinal
                                                ? oracle::mismatch_fraction(rows[i], target)
                                                : oracle::strict_fraction(rows[i], static_cast<Label>(truth[i]), target);
                        if (dv.values[i] != want)
                            return Outcome{false, "seed " + std::to_string(seed) + " row " + std::to_string(i)};
                    }
                }
            }
        }
        const double s = elapsed_since(t0);
        return Outcome{s < 10.0, "5 seeds x 200 x 50 x 2 metrics bit-exact, " + fmt(s) + "s (limit 10s)"};
    });

    criterion(6, "MLP gradient check", [] {
        const auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> u(-1, 1);
        std::normal_distribution<double> nrm(0, 1);
        double worst = 0;
        for (int config = 0; config < 20; ++config) {
            Small m;
            for (auto& p : m.params) p = u(rng);
            const std::size_t batch = 1 + rng() % 8;
            std::vector<Small::Input> xs(batch);
            std::vector<Label> ys(batch);
            for (std::size_t s = 0; s < batch; ++s) {
                for (auto& v : xs[s]) v = nrm(rng);
                ys[s] = static_cast<Label>(rng() % 4);
            }
            const auto g = gradients<Small>(m, xs, ys);
            for (std::size_t p = 0; p < Small::kParams; ++p) {
                const double saved = m.params[p], h = 1e-5;
                m.params[p] = saved + h;
                const double up = batch_loss<Small>(m, xs, ys);
                m.params[p] = saved - h;
                const double down = batch_loss<Small>(m, xs, ys);
                m.params[p] = saved;
                const double num = (up - down) / (2 * h), an = g.params[p];
                if (std::abs(num) < 1e-8 && std::abs(an) < 1e-8) continue;
                worst = std::max(worst, std::abs(num - an) / std::max(std::abs(num), std::abs(an)));
            }
        }
        const double s = elapsed_since(t0);
        char buf[96];
        std::snprintf(buf, sizeof buf, "20 configs, max rel err %.2e (limit 1e-4), %.2fs", worst, s);
        return Outcome{worst < 1e-4 && s < 30.0, buf};
    });

    criterion(7, "prediction-sequence table", [] {
        struct Row {
            std::vector<Label> seq;
            std::size_t distinct, changes;
        };
        // Reference columns, verbatim.
        const std::vector<Row> rows{
            {{0, 0, 0, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4}, 2, 1},
            {{4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 0, 4}, 2, 2},
            {{4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 0, 4}, 2, 2},
            {{4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 0, 4, 4, 4}, 2, 2},
            {{4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 0, 4, 4, 4}, 2, 2},
            {{5, 3, 3, 3, 3, 3, 3, 3, 3, 3, 1, 1, 1, 1, 1}, 2, 2},
            {{6, 6, 6, 6, 6, 6, 0, 4, 0, 4, 0, 0, 4, 4, 4}, 3, 6},
            {{6, 6, 6, 6, 6, 6, 0, 4, 4, 4, 4, 0, 4, 4, 4}, 3, 4},
            {{6, 6, 6, 6, 6, 6, 0, 4, 4, 4, 0, 0, 4, 4, 4}, 3, 4},
            {{3, 3, 3, 3, 3, 3, 3, 3, 0, 3, 3, 0, 0, 0, 0}, 2, 3},
        };
        std::string bad;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto d = distinct_count(rows[r].seq), c = change_count(rows[r].seq);
            if (d != rows[r].distinct || c != rows[r].changes)
                bad += " row" + std::to_string(r + 1) + ":got(" + std::to_string(d) + "," + std::to_string(c) +
                       ")want(" + std::to_string(rows[r].distinct) + "," + std::to_string(rows[r].changes) + ")";
        }
        const bool quoted_ok = distinct_count(rows[0].seq) == 2 && change_count(rows[0].seq) == 1 &&
                               distinct_count(rows[1].seq) == 2 && change_count(rows[1].seq) == 2 &&
                               distinct_count(rows[6].seq) == 3 && change_count(rows[6].seq) == 6;
        return Outcome{quoted_ok && bad.empty(),
                       std::string("quoted rows 1,2,7 ") + (quoted_ok ? "ok" : "MISMATCH") + ";" +
                           (bad.empty() ? " all ten rows match" : bad)};
    });

    PipelineOutput run_a;
    bool have_run_a = false;
    criterion(8, "full-scale fidelity run", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        run_a = cmd_pipeline(RunConfig{}, work / "run_a");
        have_run_a = true;
        const double s = elapsed_since(t0);
        const auto& rep = run_a.evaluation.report;
        const double clf = rep.classifier_accuracy;
        const double ld = rep.summary(DistanceKind::Longitudinal).accuracy;
        const double sld = rep.summary(DistanceKind::StrictLongitudinal).accuracy;
        const bool a = clf >= 0.90;
        const bool b = ld >= 0.90 && sld >= 0.90 && ld >= clf - 0.03 && sld >= clf - 0.03;

        bool c = set_size_contrast(rep.outcomes, DistanceKind::Longitudinal).contrast_case_exists;
        std::string c_note = c ? "contrast case at seed 42" : "no contrast case at seed 42";
        if (!c) {
            for (std::uint64_t seed : {43, 44, 45}) {
                RunConfig cfg;
                cfg.seed = seed;
                const auto extra = cmd_pipeline(cfg, work / ("run_seed_" + std::to_string(seed)));
                if (set_size_contrast(extra.evaluation.report.outcomes, DistanceKind::Longitudinal)
                        .contrast_case_exists) {
                    c = true;
                    c_note += "; found at seed " + std::to_string(seed);
                    break;
                }
            }
            if (!c) c_note += "; none over seeds 43-45";
        }
        const auto con = set_size_contrast(rep.outcomes, DistanceKind::Longitudinal);
        std::string detail = "clf=" + fmt(clf) + " ld=" + fmt(ld) + " sld=" + fmt(sld) +
                             " clf_wrong: expl_ok=" + std::to_string(con.n_correct) +
                             " expl_wrong=" + std::to_string(con.n_wrong) + " | a:" + (a ? "ok" : "no") +
                             " b:" + (b ? "ok" : "no") + " c:" + (c ? "ok" : "no") + " (" + c_note + ") " +
                             fmt(s) + "s (limit 600s)";
        return Outcome{a && b && c && s < 600.0, detail};
    });

    criterion(9, "byte-identical reruns", [&] {
        if (!have_run_a) return Outcome{false, "first run unavailable"};
        cmd_pipeline(RunConfig{}, work / "run_b");
        std::string bad;
        for (const auto* rel : {"data/train.csv", "data/test.csv", "data/data_manifest.json", "model/train.ldtr",
                                "model/test.ldtr", "model/model_manifest.json", "report/outcomes.csv",
                                "report/fidelity_report.json", "run_manifest.json"}) {
            if (slurp(work / "run_a" / rel) != slurp(work / "run_b" / rel)) bad += std::string(" ") + rel;
        }
        return Outcome{bad.empty(), bad.empty() ? "9 artifacts identical" : "differ:" + bad};
    });

    criterion(10, "trace format round trip and fuzz", [] {
        std::mt19937_64 rng(10);
        for (int t = 0; t < 100; ++t) {
            const std::size_t n = rng() % 50, k = 1 + rng() % 20, classes = 2 + rng() % 20;
            std::uint64_t s = rng();
            std::vector<Label> preds(n * k);
            for (auto& p : preds) p = static_cast<Label>(oracle::random_below(s, classes));
            std::optional<std::vector<Label>> truth;
            if (rng() & 1) {
                truth.emplace(n);
                for (auto& y : *truth) y = static_cast<Label>(oracle::random_below(s, classes));
            }
            const TraceMatrix tm(n, k, classes, preds, truth);
            const auto bytes = encode_trace(tm);
            if (!(decode_trace(bytes) == tm) || encode_trace(decode_trace(bytes)) != bytes)
                return Outcome{false, "round trip failed at trace " + std::to_string(t)};
        }
        const TraceMatrix base(4, 3, 5, {0, 1, 2, 3, 4, 0, 1, 2, 3, 4, 0, 1}, std::vector<Label>{0, 1, 2, 3});
        const auto good = encode_trace(base);
        std::size_t rejected = 0, accepted = 0;
        for (int t = 0; t < 20'000; ++t) {
            auto bytes = good;
            const int flips = 1 + static_cast<int>(rng() % 3);
            for (int f = 0; f < flips; ++f) bytes[rng() % kTraceHeaderSize] = static_cast<std::uint8_t>(rng());
            if (rng() % 4 == 0) bytes.resize(rng() % bytes.size());
            try {
                (void)decode_trace(bytes);
                ++accepted;
            } catch (const FormatError&) {
                ++rejected;
            } catch (const std::exception& e) {
                return Outcome{false, std::string("unexpected exception type: ") + e.what()};
            }
        }
        return Outcome{true, "100 traces round-trip; 20000 corrupted headers: " + std::to_string(rejected) +
                                 " rejected cleanly, " + std::to_string(accepted) + " still valid"};
    });

    std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "OK", failures);
    return failures ? 1 : 0;
}
