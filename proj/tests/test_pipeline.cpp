#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ssanet/pipeline/feature_select.hpp"
#include "ssanet/pipeline/train.hpp"
#include "test_support.hpp"

using namespace ssanet;

namespace {

GeneratorConfig small_gen(std::uint64_t seed = 0) {
    GeneratorConfig g;
    g.n_samples = 20;
    g.frames = 6;
    g.height = 5;
    g.width = 4;
    g.seed = seed;
    return g;
}

std::string to_csv(const Dataset& d) {
    std::ostringstream os;
    write_csv(os, d);
    return os.str();
}

template <class E>
std::string thrown_message(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const E& e) {
        return e.what();
    }
    return "<nothing thrown>";
}

std::pair<double, double> centroid(const Tensor& f) {
    double s = 0, y = 0, x = 0;
    for (std::size_t i = 0; i < f.dim(0); ++i)
        for (std::size_t j = 0; j < f.dim(1); ++j) {
            s += f.at(i, j, 0);
            y += f.at(i, j, 0) * static_cast<double>(i);
            x += f.at(i, j, 0) * static_cast<double>(j);
        }
    return {y / s, x / s};
}

}  // namespace

TEST(Generator, AnomalyRateExtremes) {
    auto g = small_gen();
    g.anomaly_rate = 0.0;
    for (const auto& s : generate_synthetic(g)) EXPECT_EQ(s.label, 0);
    g.anomaly_rate = 1.0;
    for (const auto& s : generate_synthetic(g)) EXPECT_EQ(s.label, 1);
}

TEST(Generator, ExactAnomalyCountAndShapes) {
    auto g = small_gen(3);
    g.anomaly_rate = 0.3;
    const Dataset d = generate_synthetic(g);
    ASSERT_EQ(d.size(), 20u);
    int pos = 0;
    for (const auto& s : d) {
        pos += s.label;
        ASSERT_EQ(s.frames.size(), 6u);
        for (const auto& f : s.frames) EXPECT_EQ(f.shape(), (Shape{5, 4, 1}));
        if (s.label) {
            EXPECT_GE(s.anomaly_magnitude, 2.0);
            EXPECT_LT(s.anomaly_magnitude, 4.0);
        } else {
            EXPECT_EQ(s.anomaly_magnitude, 0.0);
        }
    }
    EXPECT_EQ(pos, 6);
}

TEST(Generator, SameSeedBitIdentical) {
    EXPECT_EQ(generate_synthetic(small_gen(5)), generate_synthetic(small_gen(5)));
    EXPECT_NE(generate_synthetic(small_gen(5)), generate_synthetic(small_gen(6)));
}

TEST(Generator, AnomalyIsAMidSequenceJump) {
    GeneratorConfig g;
    g.n_samples = 30;
    g.height = g.width = 24;  // large enough that the blob never leaves the frame
    g.noise_std = 0.0;
    g.seed = 1;
    for (const auto& s : generate_synthetic(g)) {
        for (std::size_t t = 1; t < g.frames; ++t) {
            const auto [y0, x0] = centroid(s.frames[t - 1]);
            const auto [y1, x1] = centroid(s.frames[t]);
            const double step = std::hypot(y1 - y0, x1 - x0);
            if (s.label && t == g.frames / 2)
                EXPECT_GT(step, 1.4);
            else
                EXPECT_LT(step, 0.5);
        }
    }
}

TEST(Generator, InvalidConfigRejected) {
    auto g = small_gen();
    g.anomaly_rate = 1.5;
    EXPECT_THROW(generate_synthetic(g), ConfigError);
    g = small_gen();
    g.frames = 0;
    EXPECT_THROW(generate_synthetic(g), ConfigError);
}

TEST(Csv, RoundTripIsExact) {
    const Dataset d = generate_synthetic(small_gen(2));
    std::istringstream is(to_csv(d));
    EXPECT_EQ(load_csv(is, 5, 4), d);
}

TEST(Csv, HeaderNamesColumns) {
    const std::string csv = to_csv(generate_synthetic(small_gen()));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "sample_id,t,label,magnitude,p0,p1,p2,p3,p4,p5,p6,p7,p8,p9,p10,p11,p12,"
                                             "p13,p14,p15,p16,p17,p18,p19");
}

TEST(Csv, EmptyFileIsSchemaError) {
    std::istringstream empty("");
    EXPECT_THROW(load_csv(empty, 2, 2), SchemaError);
    std::istringstream header_only("sample_id,t,label,magnitude,p0,p1,p2,p3\n");
    EXPECT_THROW(load_csv(header_only, 2, 2), SchemaError);
}

TEST(Csv, WrongFieldCountNamesLine) {
    std::istringstream is("sample_id,t,label,magnitude,p0,p1,p2,p3\n0,0,0,0,1,2,3,4\n0,1,0,0,1,2,3\n");
    try {
        load_csv(is, 2, 2);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Csv, MalformedInputs) {
    const std::string head = "sample_id,t,label,magnitude,p0,p1,p2,p3\n";
    auto load = [](const std::string& s, std::size_t h = 2, std::size_t w = 2) {
        std::istringstream is(s);
        return load_csv(is, h, w);
    };
    EXPECT_THROW(load("id,t,label,magnitude,p0,p1,p2,p3\n0,0,0,0,1,2,3,4\n"), ParseError);
    EXPECT_THROW(load(head + "0,0,0,0,1,2,3,4\n", 3, 3), SchemaError);
    EXPECT_THROW(load(head + "0,0,0,0,1,x,3,4\n"), ParseError);
    EXPECT_THROW(load(head + "0,0,2,0,1,2,3,4\n"), ParseError);
    EXPECT_THROW(load(head + "0,0,0,0,1,2,3,nan\n"), ParseError);
    EXPECT_THROW(load(head + "0,1,0,0,1,2,3,4\n"), SchemaError);
    EXPECT_THROW(load(head + "0,0,0,0,1,2,3,4\n0,2,0,0,1,2,3,4\n"), SchemaError);
    EXPECT_THROW(load(head + "0,0,0,0,1,2,3,4\n1,0,0,0,1,2,3,4\n0,0,0,0,1,2,3,4\n"), SchemaError);
    EXPECT_THROW(load(head + "0,0,0,0,1,2,3,4\n0,1,0,0,1,2,3,4\n1,0,0,0,1,2,3,4\n"), SchemaError);
    EXPECT_THROW(load(head + "0,0,0,0,1,2,3,4\n0,1,1,0,1,2,3,4\n"), SchemaError);
    EXPECT_NO_THROW(load(head + "0,0,1,2.5,1,2,3,4\n0,1,1,2.5,1,2,3,4\n"));
}

TEST(Split, DisjointExhaustiveDeterministic) {
    for (std::size_t n : {1, 7, 50, 200}) {
        SplitSpec spec;
        spec.seed = n;
        const Split s = split_indices(n, spec);
        std::set<std::size_t> all;
        for (const auto* part : {&s.train, &s.validation, &s.test}) all.insert(part->begin(), part->end());
        EXPECT_EQ(all.size(), n);
        EXPECT_EQ(s.train.size() + s.validation.size() + s.test.size(), n);
        EXPECT_EQ(*all.rbegin(), n - 1);
        const Split again = split_indices(n, spec);
        EXPECT_EQ(again.train, s.train);
        EXPECT_EQ(again.test, s.test);
    }
    const Split s = split_indices(200, SplitSpec{});
    EXPECT_EQ(s.train.size(), 120u);
    EXPECT_EQ(s.validation.size(), 40u);
    EXPECT_EQ(s.test.size(), 40u);
}

TEST(Split, BadFractionsRejected) {
    SplitSpec s;
    s.test = 0.3;
    EXPECT_THROW(split_indices(10, s), ConfigError);
    s = SplitSpec{};
    s.train = -0.1;
    s.validation = 0.9;
    EXPECT_THROW(split_indices(10, s), ConfigError);
}

TEST(Normalize, TrainSplitIsStandardised) {
    const Dataset d = generate_synthetic(small_gen(4));
    const Split sp = split_indices(d.size(), SplitSpec{});
    const auto [nd, st] = normalize(d, sp.train);
    const std::size_t px = 20;
    for (std::size_t p = 0; p < px; ++p) {
        double s = 0, s2 = 0, n = 0;
        for (auto i : sp.train)
            for (const auto& f : nd[i].frames) s += f[p], s2 += f[p] * f[p], ++n;
        EXPECT_NEAR(s / n, 0.0, 1e-9);
        EXPECT_NEAR(s2 / n, 1.0, 1e-9);
    }
    EXPECT_EQ(st.mean.size(), px);
}

TEST(Normalize, ConstantPixelMapsToZero) {
    Dataset d = generate_synthetic(small_gen(5));
    for (auto& s : d)
        for (auto& f : s.frames) f[3] = 2.75;
    const auto [nd, st] = normalize(d, std::vector<std::size_t>{0, 1, 2, 3});
    EXPECT_EQ(st.stddev[3], std::sqrt(NormStats::variance_floor));
    for (const auto& s : nd)
        for (const auto& f : s.frames) EXPECT_EQ(f[3], 0.0);
}

TEST(Normalize, StoredStatsAreNotRefit) {
    const Dataset d = generate_synthetic(small_gen(6));
    const std::vector<std::size_t> idx{0, 1, 2, 3, 4, 5};
    const auto [once, st] = normalize(d, idx);
    const Dataset twice = st.apply(once);
    const auto [refit, st2] = normalize(once, idx);
    EXPECT_NE(twice, once);
    for (std::size_t p = 0; p < st2.mean.size(); ++p) EXPECT_NEAR(st2.stddev[p], 1.0, 1e-9);
    for (std::size_t q = 0; q < refit[0].frames[0].size(); ++q)
        EXPECT_NEAR(refit[0].frames[0][q], once[0].frames[0][q], 1e-9);
    EXPECT_THROW(st.apply(Tensor({3, 3, 1})), DimensionError);
}

TEST(Mask, ApplyZeroesDroppedPixels) {
    const Dataset d = generate_synthetic(small_gen(7));
    std::vector<std::uint8_t> m(20, 0);
    m[4] = 1;
    const Dataset md = apply_mask(d, m);
    for (std::size_t s = 0; s < d.size(); ++s)
        for (std::size_t t = 0; t < d[s].frames.size(); ++t)
            for (std::size_t p = 0; p < 20; ++p) EXPECT_EQ(md[s].frames[t][p], p == 4 ? d[s].frames[t][p] : 0.0);
    EXPECT_THROW(apply_mask(d, std::vector<std::uint8_t>(19, 1)), DimensionError);
}

TEST(Mask, ThresholdRule) {
    EXPECT_EQ(threshold_mask(std::vector<double>{0.2, 0.5, 0.7}), (std::vector<std::uint8_t>{0, 1, 1}));
    EXPECT_EQ(threshold_mask(std::vector<double>{0.2, 0.4, 0.1}), (std::vector<std::uint8_t>{0, 1, 0}));
    EXPECT_EQ(threshold_mask(std::vector<double>{0.3, 0.3, 0.1}), (std::vector<std::uint8_t>{1, 0, 0}));
}

TEST(FeatureSelect, DeterministicAndNeverEmpty) {
    const Dataset raw = generate_planted_pixel(60, 6, 4, 4, 9, 1.0, 3);
    const Split sp = split_indices(raw.size(), SplitSpec{});
    const Dataset d = normalize(raw, sp.train).first;
    FeatureSelectConfig cfg;
    cfg.ssa.iter_max = 30;
    cfg.ssa.seed = 2;
    const auto a = feature_select_ssa(d, sp, cfg), b = feature_select_ssa(d, sp, cfg);
    EXPECT_EQ(a.mask, b.mask);
    EXPECT_EQ(a.history, b.history);
    EXPECT_GE(std::count(a.mask.begin(), a.mask.end(), 1), 1);
    for (std::size_t t = 1; t < a.history.size(); ++t) EXPECT_LE(a.history[t], a.history[t - 1]);
}

TEST(FeatureSelect, PlantedPixelMatchesExhaustiveOracle) {
    const std::size_t signal = 6;
    const Dataset raw = generate_planted_pixel(80, 8, 4, 4, signal, 1.0, 11);
    const Split sp = split_indices(raw.size(), SplitSpec{});
    const Dataset d = normalize(raw, sp.train).first;
    const MaskObjective obj(d, sp, 0.0);
    std::size_t best = 0;
    double best_val = 2.0;
    for (std::size_t p = 0; p < 16; ++p) {
        std::vector<std::uint8_t> m(16, 0);
        m[p] = 1;
        const double v = obj.mask_objective(m);
        if (v < best_val) best_val = v, best = p;
    }
    ASSERT_EQ(best, signal);
    FeatureSelectConfig cfg;
    cfg.lambda = 0.0;
    cfg.ssa.iter_max = 50;
    const auto r = feature_select_ssa(d, sp, cfg);
    EXPECT_EQ(r.mask[signal], 1);
    EXPECT_LE(r.objective, best_val + 1e-12);
}

TEST(FeatureSelect, SingleClassSplitRejected) {
    auto g = small_gen();
    g.anomaly_rate = 0.0;
    const Dataset d = generate_synthetic(g);
    EXPECT_THROW(MaskObjective(d, split_indices(d.size(), SplitSpec{}), 0.05), DomainError);
}

TEST(Evaluate, ZeroNetworkAccuracyIsNegativePrevalence) {
    GeneratorConfig g;
    g.n_samples = 40;
    g.anomaly_rate = 0.25;
    g.seed = 9;
    const Dataset d = generate_synthetic(g);
    const auto r = evaluate(zero_network(NetworkConfig{}), d);
    EXPECT_EQ(r.accuracy, 0.75);
    EXPECT_EQ(r.confusion.tp + r.confusion.fp, 0u);
    EXPECT_EQ(*r.auc, 0.5);
}

TEST(Train, BestLogitCut) {
    const std::vector<double> logits{-2, -1, 1, 2};
    EXPECT_EQ(best_logit_cut(logits, std::vector<int>{0, 0, 1, 1}), 0.0);
    EXPECT_EQ(best_logit_cut(std::vector<double>{3, 4, 5, 6}, std::vector<int>{0, 0, 1, 1}), 4.5);
    EXPECT_EQ(best_logit_cut(std::vector<double>{1, 1}, std::vector<int>{0, 0}), 2.0);
}

TEST(Train, SmallRunIsConsistent) {
    GeneratorConfig g;
    g.n_samples = 60;
    g.seed = 2;
    const Dataset raw = generate_synthetic(g);
    SplitSpec spec;
    spec.seed = 2;
    const Split sp = split_indices(raw.size(), spec);
    const Dataset d = normalize(raw, sp.train).first;
    TrainConfig cfg;
    cfg.ssa.iter_max = 15;
    cfg.ssa.pop_size = 12;
    cfg.ssa.seed = 2;
    cfg.init_seed = 2;
    const TrainResult r = train_with_ssa(d, sp, cfg);
    EXPECT_EQ(r.params.size(), ParamCodec(cfg.network).total_count());
    EXPECT_EQ(r.ssa_dim, 177u);
    ASSERT_EQ(r.history.size(), 16u);
    for (std::size_t t = 1; t < r.history.size(); ++t) EXPECT_LE(r.history[t], r.history[t - 1]);
    for (std::size_t i = 58; i < r.params.size(); ++i) EXPECT_LE(std::abs(r.params[i]), 3.0 + std::abs(r.head_bias_shift));
    EXPECT_EQ(r.test.n, sp.test.size());

    // calibration moves only the head bias, so the test ranking and AUC are unchanged
    TrainConfig raw_cfg = cfg;
    raw_cfg.calibrate_threshold = false;
    const TrainResult u = train_with_ssa(d, sp, raw_cfg);
    EXPECT_EQ(u.head_bias_shift, 0.0);
    EXPECT_NEAR(*u.test.auc, *r.test.auc, 1e-12);
    EXPECT_EQ(std::vector<double>(u.params.begin(), u.params.end() - 1),
              std::vector<double>(r.params.begin(), r.params.end() - 1));

    // full-network replay of the stored parameters scores the validation split like the cached objective
    const WeightObjective obj(d, sp.validation, raw_cfg);
    const std::vector<double> trainable(u.params.begin() + 58, u.params.end());
    const Network net = ParamCodec(cfg.network).unflatten(u.params);
    const auto cached = obj.scores(trainable);
    for (std::size_t k = 0; k < sp.validation.size(); ++k)
        EXPECT_NEAR(cached[k], network_forward(d[sp.validation[k]].frames, net), 1e-12);
    EXPECT_NEAR(u.validation_auc, obj.validation_auc(trainable), 1e-12);
}

TEST(Train, UnfrozenSearchCoversEveryWeight) {
    GeneratorConfig g;
    g.n_samples = 30;
    g.frames = 4;
    const Dataset d = generate_synthetic(g);
    const Split sp = split_indices(d.size(), SplitSpec{});
    TrainConfig cfg;
    cfg.freeze_extractor = false;
    cfg.ssa.iter_max = 2;
    cfg.ssa.pop_size = 5;
    const TrainResult r = train_with_ssa(d, sp, cfg);
    EXPECT_EQ(r.ssa_dim, 235u);
}

TEST(Train, SingleClassValidationRejected) {
    auto g = small_gen();
    g.anomaly_rate = 0.0;
    const Dataset d = generate_synthetic(g);
    TrainConfig cfg;
    cfg.network.frame_h = 5;
    cfg.network.frame_w = 4;
    EXPECT_THROW(train_with_ssa(d, split_indices(d.size(), SplitSpec{}), cfg), ConfigError);
}
