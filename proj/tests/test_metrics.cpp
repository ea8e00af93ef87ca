#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "faithbench/metrics.hpp"
#include "helpers.hpp"

using namespace faithbench;

namespace {

// 60 rows, clear linear signal, 3:1 train/test split.
Dataset signal_dataset(uint64_t seed = 41) {
    SyntheticSpec spec;
    spec.n_samples = 60;
    spec.n_features = 4;
    spec.coefficients = {2.0, -1.0, 0.5, 0.0};
    spec.noise_std = 0.2;
    spec.seed = seed;
    return standardize(generate_synthetic(spec));
}

AttributionTable table_of(const Dataset& ds, const Eigen::MatrixXd& values) {
    AttributionTable table;
    table.values = values;
    table.method = {MethodId::Kind::imported, "fixture"};
    table.baseline = BaselineKind::training;
    table.dataset_hash = ds.hash();
    return table;
}

// Constant-output model: zero weights, bias at logit(p).
DenseModel constant_model(int d, double p) {
    return testutil::make_linear_model(std::vector<double>(static_cast<size_t>(d), 0.0),
                                       std::log(p / (1.0 - p)));
}

}  // namespace

TEST_CASE("auroc agrees with hand-checked orderings") {
    std::vector<int> labels = {0, 0, 1, 1};
    std::vector<size_t> idx = {0, 1, 2, 3};
    Eigen::VectorXd perfect(4);
    perfect << 0.1, 0.2, 0.8, 0.9;
    CHECK(auroc(perfect, labels, idx) == 1.0);

    Eigen::VectorXd reversed(4);
    reversed << 0.9, 0.8, 0.2, 0.1;
    CHECK(auroc(reversed, labels, idx) == 0.0);

    Eigen::VectorXd tied(4);
    tied << 0.5, 0.5, 0.5, 0.5;
    CHECK(auroc(tied, labels, idx) == 0.5);

    // One concordant positive out of two: verified against direct pair
    // counting (3 wins + 1 tie-free loss out of 4 pairs).
    Eigen::VectorXd mixed(4);
    mixed << 0.3, 0.6, 0.5, 0.9;
    CHECK(auroc(mixed, labels, idx) == doctest::Approx(0.75).epsilon(1e-12));

    std::vector<int> single(4, 1);
    CHECK_THROWS_AS(auroc(perfect, single, idx), Error);
}

TEST_CASE("PGI vanishes for constant models") {
    const Dataset ds = signal_dataset();
    const DenseModel model = constant_model(4, 0.7);
    const AttributionTable table = table_of(ds, Eigen::MatrixXd::Random(60, 4));
    PerturbSpec spec;
    spec.seed = 3;
    PgiConfig cfg;
    cfg.m = 5;
    CHECK(pgi(model, ds, table, spec, cfg).value == 0.0);
}

TEST_CASE("PGI vanishes under the identity perturbation") {
    const Dataset ds = signal_dataset();
    TrainConfig tc;
    tc.epochs = 30;
    const DenseModel model = train(ds, tc, ArchTag::linear);
    const AttributionTable table = table_of(ds, Eigen::MatrixXd::Random(60, 4));
    PerturbSpec spec;
    spec.sigma = 0.0;
    spec.flip_prob = 0.0;
    PgiConfig cfg;
    cfg.m = 5;
    CHECK(pgi(model, ds, table, spec, cfg).value == 0.0);
}

TEST_CASE("PGI with a deterministic flip equals the hand-computed gap") {
    // One numeric column plus a binary one-hot group; flipping the group with
    // probability 1 is a deterministic perturbation, so PGI reduces to the
    // mean |f(x) - f(x_flipped)| over test rows.
    FeatureSchema schema;
    schema.columns = {{"num", ColumnKind::numeric, "", 0},
                      {"g0", ColumnKind::one_hot_member, "g", 2},
                      {"g1", ColumnKind::one_hot_member, "g", 2}};
    Dataset ds;
    ds.schema = schema;
    ds.X.resize(4, 3);
    ds.X << 0.5, 1, 0,
            -0.5, 0, 1,
            1.0, 1, 0,
            -1.0, 0, 1;
    ds.y = {1, 0, 1, 0};
    ds.split = {SplitTag::train, SplitTag::train, SplitTag::test, SplitTag::test};
    ds.standardization.mean.assign(3, 0.0);
    ds.standardization.stddev.assign(3, 1.0);
    ds.validate();

    const DenseModel model = testutil::make_linear_model({0.3, 1.2, -1.2}, 0.0);

    Eigen::MatrixXd attr = Eigen::MatrixXd::Zero(4, 3);
    attr.col(1).setConstant(5.0);  // group always wins the top-1 slot
    const AttributionTable table = table_of(ds, attr);

    PerturbSpec spec;
    spec.sigma = 0.0;
    spec.flip_prob = 1.0;
    spec.seed = 77;
    PgiConfig cfg;
    cfg.k = 1;
    cfg.m = 4;
    cfg.aggregate_categorical = true;

    double expected = 0.0;
    for (size_t i : ds.test_indices()) {
        const Eigen::VectorXd x = ds.X.row(static_cast<Eigen::Index>(i));
        Eigen::VectorXd flipped = x;
        std::swap(flipped(1), flipped(2));
        expected += std::abs(model.predict(x) - model.predict(flipped));
    }
    expected /= 2.0;

    CHECK(pgi(model, ds, table, spec, cfg).value == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("PGI is invariant to positive rescaling of the table") {
    const Dataset ds = signal_dataset();
    TrainConfig tc;
    tc.epochs = 30;
    const DenseModel model = train(ds, tc, ArchTag::linear);

    Eigen::MatrixXd values = Eigen::MatrixXd::Random(60, 4);
    const AttributionTable table = table_of(ds, values);
    const AttributionTable scaled = table_of(ds, (17.0 * values).eval());

    PerturbSpec spec;
    spec.seed = 5;
    PgiConfig cfg;
    cfg.m = 6;
    CHECK(pgi(model, ds, table, spec, cfg).value == pgi(model, ds, scaled, spec, cfg).value);
}

TEST_CASE("pgi_sweep emits one point per k and k=d dominates k=1 on ground truth") {
    SyntheticSpec spec;
    spec.n_samples = 300;
    spec.n_features = 6;
    spec.seed = 4;
    const Dataset ds = standardize(generate_synthetic(spec));
    TrainConfig tc;
    tc.epochs = 60;
    const DenseModel model = train(ds, tc, ArchTag::linear);
    const AttributionTable gt = ground_truth_linear(model, ds);

    PerturbSpec pspec;
    pspec.seed = 9;
    PgiConfig cfg;
    cfg.m = 10;
    std::vector<int> ks;
    for (int k = 1; k <= 6; ++k) ks.push_back(k);
    const auto sweep = pgi_sweep(model, ds, gt, pspec, ks, cfg);
    CHECK(sweep.size() == 6);
    for (int k = 1; k <= 6; ++k) CHECK(sweep[static_cast<size_t>(k - 1)].first == k);
    CHECK(sweep.back().second.value >= sweep.front().second.value);

    // The k=d point equals a direct PGI call with every unit selected.
    PgiConfig full = cfg;
    full.k = 6;
    CHECK(sweep.back().second.value == pgi(model, ds, gt, pspec, full).value);

    CHECK_THROWS_AS(pgi_sweep(model, ds, gt, pspec, {}, cfg), Error);
}

TEST_CASE("normalized_curve_area matches hand trapezoids") {
    CHECK(normalized_curve_area({1.0, 0.5, 0.0}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normalized_curve_area({0.8, 0.8, 0.8, 0.8}) == doctest::Approx(0.8).epsilon(1e-15));
    // Dipping earlier shrinks the area.
    CHECK(normalized_curve_area({1.0, 0.2, 0.1}) < normalized_curve_area({1.0, 0.9, 0.1}));
}

TEST_CASE("ablation curves start at the unablated AUROC and are deterministic") {
    const Dataset ds = signal_dataset();
    TrainConfig tc;
    tc.epochs = 40;
    const DenseModel model = train(ds, tc, ArchTag::linear);
    const AttributionTable gt = ground_truth_linear(model, ds);

    PerturbSpec spec;
    spec.numeric_mode = NumericMode::marginal;
    spec.seed = 6;
    AblationConfig cfg;
    cfg.seed = 6;

    const AblationCurve curve = ablation_curve(model, ds, gt, spec, cfg);
    CHECK(curve.steps.size() == 5);  // 0..4 units
    CHECK(curve.performance.size() == 5);

    const auto test_rows = ds.test_indices();
    Eigen::MatrixXd X(test_rows.size(), ds.X.cols());
    for (size_t i = 0; i < test_rows.size(); ++i)
        X.row(static_cast<Eigen::Index>(i)) = ds.X.row(static_cast<Eigen::Index>(test_rows[i]));
    CHECK(curve.performance[0] == auroc(model.predict_batch(X), ds.y, test_rows));

    const AblationCurve again = ablation_curve(model, ds, gt, spec, cfg);
    CHECK(curve.performance == again.performance);
    CHECK(curve.auc == again.auc);
}

TEST_CASE("abc keeps the lower-is-better direction") {
    AblationCurve curve;
    curve.steps = {0, 1, 2};
    curve.performance = {1.0, 0.5, 0.0};
    curve.auc = normalized_curve_area(curve.performance);
    const MetricScore score = abc(curve, {"m", "b", 0});
    CHECK(score.value == doctest::Approx(0.5));
    CHECK(score.direction == Direction::lower_better);
    CHECK(score.metric == MetricKind::abc);
}

TEST_CASE("ablation degrades faster under the informative ordering") {
    SyntheticSpec sspec;
    sspec.n_samples = 400;
    sspec.n_features = 8;
    sspec.coefficients = {3.0, -2.5, 2.0, -1.5, 0.1, 0.1, 0.1, 0.1};
    sspec.noise_std = 0.2;
    sspec.seed = 10;
    const Dataset ds = standardize(generate_synthetic(sspec));
    TrainConfig tc;
    tc.epochs = 80;
    const DenseModel model = train(ds, tc, ArchTag::linear);

    PerturbSpec spec;
    spec.numeric_mode = NumericMode::marginal;
    spec.seed = 12;
    AblationConfig cfg;
    cfg.seed = 12;

    const AttributionTable gt = ground_truth_linear(model, ds);
    AttributionTable random = random_explanations(400, 8, 31);
    random.dataset_hash = ds.hash();

    const double abc_gt = ablation_curve(model, ds, gt, spec, cfg).auc;
    const double abc_random = ablation_curve(model, ds, random, spec, cfg).auc;
    CHECK(abc_gt < abc_random);
}

TEST_CASE("ablation rejects a single-class test split") {
    Dataset ds = signal_dataset();
    for (size_t i : ds.test_indices()) ds.y[i] = 1;
    TrainConfig tc;
    tc.epochs = 5;
    const DenseModel model = train(ds, tc, ArchTag::linear);
    const AttributionTable gt = ground_truth_linear(model, ds);
    PerturbSpec spec;
    AblationConfig cfg;
    CHECK_THROWS_AS(ablation_curve(model, ds, gt, spec, cfg), Error);
}

TEST_CASE("random_feature_cutoff returns the best mean rank of an injected feature") {
    // d=4 with columns 2,3 injected; build attributions placing __rnd_0
    // always first and __rnd_1 always last.
    Dataset ds = testutil::make_dataset({{1, 1, 1, 1}, {2, 2, 2, 2}}, {0, 1},
                                        {SplitTag::train, SplitTag::test});
    ds.schema.columns[2].name = "__rnd_0";
    ds.schema.columns[3].name = "__rnd_1";

    Eigen::MatrixXd values(2, 4);
    values << 0.3, 0.2, 0.9, 0.01,
              0.3, 0.2, 0.9, 0.01;
    const AttributionTable table = table_of(ds, values);
    CHECK(random_feature_cutoff({table}, ds) == 1.0);

    Eigen::MatrixXd last(2, 4);
    last << 0.9, 0.8, 0.02, 0.01,
            0.9, 0.8, 0.02, 0.01;
    CHECK(random_feature_cutoff({table_of(ds, last)}, ds) == 3.0);

    // Hand-built mean: ranks of __rnd_0 are {1, 3} across the two tables'
    // test rows -> mean 2; __rnd_1 is always 4.
    Eigen::MatrixXd mixed(2, 4);
    mixed << 0.3, 0.2, 0.9, 0.01,
             0.9, 0.8, 0.02, 0.01;
    CHECK(random_feature_cutoff({table_of(ds, values), table_of(ds, mixed)}, ds) ==
          doctest::Approx(2.0));

    const Dataset plain = testutil::make_dataset({{1, 2}}, {1}, {SplitTag::test});
    CHECK_THROWS_AS(random_feature_cutoff({table_of(plain, Eigen::MatrixXd::Zero(1, 2))}, plain),
                    Error);
}
