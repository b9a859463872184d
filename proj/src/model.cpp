#include "thermoreg/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace thermo {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr int kModelFormatVersion = 1;

const std::vector<std::pair<Family, const char*>>& family_table()
{
    static const std::vector<std::pair<Family, const char*>> t{
        {Family::linear, "linear"},       {Family::quadratic, "quadratic"}, {Family::weighted, "weighted"},
        {Family::binning, "binning"},     {Family::piecewise, "piecewise"}, {Family::knn, "knn"},
        {Family::svr, "svr"},             {Family::forest, "forest"},
    };
    return t;
}

bool is_number_hp(const HpValue& v) { return std::holds_alternative<double>(v); }

int as_int(double v, const std::string& key)
{
    if (v != std::floor(v)) {
        throw ConfigError("hyperparameter '" + key + "' must be an integer");
    }
    return static_cast<int>(v);
}

nlohmann::json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector json_vec(const nlohmann::json& j)
{
    auto v = j.get<std::vector<double>>();
    return Eigen::Map<Vector>(v.data(), static_cast<Index>(v.size()));
}

nlohmann::json mat_json(const Matrix& m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        rows.push_back(vec_json(m.row(i).transpose()));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Matrix json_mat(const nlohmann::json& j)
{
    Matrix m(j.at("rows").get<Index>(), j.at("cols").get<Index>());
    const auto& data = j.at("data");
    for (Index i = 0; i < m.rows(); ++i) {
        m.row(i) = json_vec(data.at(static_cast<std::size_t>(i))).transpose();
    }
    return m;
}

nlohmann::json linear_json(const LinearModel& m) { return {{"weights", vec_json(m.weights)}, {"intercept", m.intercept}}; }

LinearModel json_linear(const nlohmann::json& j)
{
    return LinearModel{json_vec(j.at("weights")), j.at("intercept").get<double>()};
}

} // namespace

std::string family_name(Family f)
{
    for (const auto& [fam, name] : family_table()) {
        if (fam == f) {
            return name;
        }
    }
    return "unknown";
}

Family parse_family(const std::string& name)
{
    for (const auto& [fam, n] : family_table()) {
        if (name == n) {
            return fam;
        }
    }
    throw ConfigError("unknown model family '" + name + "'");
}

std::map<std::string, HpValue> family_defaults(Family f)
{
    switch (f) {
    case Family::linear:
        return {{"l2", 0.01}};
    case Family::quadratic:
        return {{"max_degree", 2.0}, {"l2", 0.0}, {"max_columns", 1000.0}};
    case Family::weighted:
        return {{"bw_method", std::string("silverman")}, {"kde_space", std::string("target")}};
    case Family::binning:
        return {{"n_bins", 3.0}, {"driver", std::string("T_Max_1")}, {"bin_scheme", std::string("width")}};
    case Family::piecewise:
        return {{"breakpoints", 2.0}, {"driver", std::string("T_Max_1")}};
    case Family::knn:
        return {{"n_neighbors", 1.0}};
    case Family::svr:
        return {{"C", 1.0}, {"epsilon", 0.1}, {"gamma", std::string("scale")}, {"tol", 1e-4}, {"max_iter", 1e7}};
    case Family::forest:
        return {{"n_estimators", 100.0}, {"max_features", std::string("third")}, {"max_depth", 0.0},
                {"min_samples_leaf", 1.0}, {"bootstrap", 1.0}, {"seed", 0.0}};
    }
    return {};
}

EstimatorSpec::EstimatorSpec(Family f, std::map<std::string, HpValue> overrides) : family(f), hp(std::move(overrides))
{
    validate();
}

double EstimatorSpec::number(const std::string& key) const
{
    auto it = hp.find(key);
    HpValue v = it != hp.end() ? it->second : family_defaults(family).at(key);
    if (!is_number_hp(v)) {
        throw ConfigError("hyperparameter '" + key + "' must be numeric");
    }
    return std::get<double>(v);
}

std::string EstimatorSpec::text(const std::string& key) const
{
    auto it = hp.find(key);
    HpValue v = it != hp.end() ? it->second : family_defaults(family).at(key);
    if (is_number_hp(v)) {
        return format_double(std::get<double>(v));
    }
    return std::get<std::string>(v);
}

void EstimatorSpec::set_from_text(const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("hyperparameter override '" + assignment + "' is not key=value");
    }
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    double number = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), number);
    if (ec == std::errc() && ptr == value.data() + value.size()) {
        hp[key] = number;
    } else {
        hp[key] = value;
    }
    validate();
}

void EstimatorSpec::validate() const
{
    const auto defaults = family_defaults(family);
    for (const auto& [key, value] : hp) {
        auto it = defaults.find(key);
        if (it == defaults.end()) {
            throw ConfigError("hyperparameter '" + key + "' does not apply to " + family_name(family));
        }
        const bool want_number = is_number_hp(it->second);
        // gamma and max_features accept a keyword or a number
        const bool flexible = key == "gamma" || key == "max_features";
        if (!flexible && want_number != is_number_hp(value)) {
            throw ConfigError("hyperparameter '" + key + "' has the wrong type");
        }
    }
}

std::string EstimatorSpec::label() const
{
    std::string out = family_name(family);
    for (const auto& [key, value] : hp) {
        out += " " + key + "=" + (is_number_hp(value) ? format_double(std::get<double>(value)) : std::get<std::string>(value));
    }
    return out;
}

nlohmann::json EstimatorSpec::to_json() const
{
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [key, value] : hp) {
        if (is_number_hp(value)) {
            params[key] = std::get<double>(value);
        } else {
            params[key] = std::get<std::string>(value);
        }
    }
    return {{"family", family_name(family)}, {"hyperparams", params}};
}

EstimatorSpec EstimatorSpec::from_json(const nlohmann::json& j)
{
    EstimatorSpec s;
    s.family = parse_family(j.at("family").get<std::string>());
    const auto params = j.value("hyperparams", nlohmann::json::object());
    for (const auto& [key, value] : params.items()) {
        if (value.is_number()) {
            s.hp[key] = value.get<double>();
        } else {
            s.hp[key] = value.get<std::string>();
        }
    }
    s.validate();
    return s;
}

TrainedModel::TrainedModel(EstimatorSpec spec, std::vector<std::string> feature_names, ModelParams params)
    : spec_(std::move(spec)), names_(std::move(feature_names)), params_(std::move(params))
{
}

Vector TrainedModel::predict(const FeatureMatrix& m) const
{
    if (m.names != names_) {
        std::set<std::string> want(names_.begin(), names_.end());
        std::set<std::string> have(m.names.begin(), m.names.end());
        std::string missing;
        std::string extra;
        for (const auto& n : want) {
            if (!have.contains(n)) {
                missing += " " + n;
            }
        }
        for (const auto& n : have) {
            if (!want.contains(n)) {
                extra += " " + n;
            }
        }
        std::string msg = "feature columns do not match the trained model;";
        msg += " missing:" + (missing.empty() ? std::string(" none") : missing);
        msg += "; extra:" + (extra.empty() ? std::string(" none") : extra);
        if (missing.empty() && extra.empty()) {
            msg += "; column order differs";
        }
        throw DataError(msg);
    }
    if (m.rows() == 0) {
        return Vector(0);
    }
    return std::visit([&](const auto& p) { return Vector(p.predict(m.values)); }, params_);
}

TrainedModel fit(const EstimatorSpec& spec, const FeatureMatrix& train)
{
    spec.validate();
    const Matrix& x = train.values;
    const Vector& y = train.y();
    if (x.rows() == 0) {
        throw DataError("cannot fit on zero rows");
    }
    auto driver_index = [&] {
        const auto name = spec.text("driver");
        if (!train.has(name)) {
            throw ConfigError("driver feature '" + name + "' not in the feature matrix");
        }
        return train.index_of(name);
    };
    ModelParams params;
    switch (spec.family) {
    case Family::linear:
        params = fit_linear(x, y, spec.number("l2"));
        break;
    case Family::quadratic:
        params = fit_quadratic(x, y, as_int(spec.number("max_degree"), "max_degree"), spec.number("l2"),
                               static_cast<Index>(spec.number("max_columns")));
        break;
    case Family::weighted: {
        if (spec.text("bw_method") != "silverman") {
            throw ConfigError("weighted regression supports bw_method=silverman only");
        }
        const auto space = spec.text("kde_space");
        if (space != "target" && space != "feature") {
            throw ConfigError("kde_space must be 'target' or 'feature'");
        }
        params = fit_weighted(x, y, space == "target" ? KdeSpace::target : KdeSpace::feature);
        break;
    }
    case Family::binning: {
        const auto scheme = spec.text("bin_scheme");
        if (scheme != "width" && scheme != "frequency") {
            throw ConfigError("bin_scheme must be 'width' or 'frequency'");
        }
        params = fit_binning(x, y, as_int(spec.number("n_bins"), "n_bins"), driver_index(),
                             scheme == "width" ? BinScheme::equal_width : BinScheme::equal_frequency);
        break;
    }
    case Family::piecewise:
        params = fit_piecewise(x, y, as_int(spec.number("breakpoints"), "breakpoints"), driver_index());
        break;
    case Family::knn:
        params = fit_knn(x, y, as_int(spec.number("n_neighbors"), "n_neighbors"));
        break;
    case Family::svr: {
        const auto g = spec.text("gamma");
        double gamma = 0.0;
        if (g == "scale") {
            gamma = scale_gamma(x);
        } else {
            gamma = spec.number("gamma");
        }
        params = fit_svr(x, y, spec.number("C"), spec.number("epsilon"), gamma, spec.number("tol"),
                         static_cast<long>(spec.number("max_iter")));
        break;
    }
    case Family::forest: {
        ForestOptions opt;
        opt.n_estimators = as_int(spec.number("n_estimators"), "n_estimators");
        const auto mf = spec.text("max_features");
        if (mf == "third") {
            opt.max_features = 0;
        } else if (mf == "all") {
            opt.max_features = static_cast<int>(x.cols());
        } else {
            opt.max_features = as_int(spec.number("max_features"), "max_features");
        }
        opt.max_depth = as_int(spec.number("max_depth"), "max_depth");
        opt.min_samples_leaf = as_int(spec.number("min_samples_leaf"), "min_samples_leaf");
        opt.bootstrap = spec.number("bootstrap") != 0.0;
        opt.seed = static_cast<std::uint64_t>(spec.number("seed"));
        params = fit_forest(x, y, opt);
        break;
    }
    }
    return TrainedModel(spec, train.names, std::move(params));
}

nlohmann::json TrainedModel::to_json() const
{
    nlohmann::json j;
    j["format"] = "thermoreg-model";
    j["format_version"] = kModelFormatVersion;
    j["spec"] = spec_.to_json();
    j["features"] = names_;
    nlohmann::json p;
    std::visit(overloaded{
                   [&](const LinearModel& m) {
                       p = linear_json(m);
                       p["kind"] = "linear";
                   },
                   [&](const QuadraticModel& m) {
                       p = {{"kind", "quadratic"}, {"degree", m.degree}, {"inner", linear_json(m.inner)}};
                   },
                   [&](const BinnedModel& m) {
                       nlohmann::json bins = nlohmann::json::array();
                       for (std::size_t b = 0; b < m.per_bin.size(); ++b) {
                           bins.push_back({{"model", linear_json(m.per_bin[b])},
                                           {"fallback", static_cast<bool>(m.uses_fallback[b])}});
                       }
                       p = {{"kind", "binning"},
                            {"driver", m.driver},
                            {"edges", m.edges},
                            {"bins", bins},
                            {"fallback", linear_json(m.fallback)}};
                   },
                   [&](const PiecewiseModel& m) {
                       p = {{"kind", "piecewise"}, {"driver", m.driver}, {"knots", m.knots},
                            {"inner", linear_json(m.inner)}};
                   },
                   [&](const KnnModel& m) {
                       p = {{"kind", "knn"}, {"k", m.k}, {"train_x", mat_json(m.train_x)},
                            {"train_y", vec_json(m.train_y)}};
                   },
                   [&](const SvrModel& m) {
                       p = {{"kind", "svr"},         {"support_vectors", mat_json(m.support_vectors)},
                            {"dual_coefs", vec_json(m.dual_coefs)}, {"bias", m.bias},
                            {"gamma", m.gamma},      {"C", m.c},
                            {"epsilon", m.epsilon}};
                   },
                   [&](const ForestModel& m) {
                       nlohmann::json trees = nlohmann::json::array();
                       for (const auto& t : m.trees) {
                           nlohmann::json nodes = nlohmann::json::array();
                           for (const auto& n : t.nodes) {
                               nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
                           }
                           trees.push_back(nodes);
                       }
                       p = {{"kind", "forest"}, {"trees", trees}};
                   },
               },
               params_);
    j["params"] = p;
    return j;
}

TrainedModel TrainedModel::from_json(const nlohmann::json& j)
{
    try {
        if (j.at("format").get<std::string>() != "thermoreg-model") {
            throw ConfigError("not a model artifact");
        }
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion) {
            throw ConfigError("unsupported model format version " + std::to_string(version));
        }
        auto spec = EstimatorSpec::from_json(j.at("spec"));
        auto names = j.at("features").get<std::vector<std::string>>();
        const auto& p = j.at("params");
        const auto kind = p.at("kind").get<std::string>();
        ModelParams params;
        if (kind == "linear") {
            params = json_linear(p);
        } else if (kind == "quadratic") {
            params = QuadraticModel{p.at("degree").get<int>(), json_linear(p.at("inner"))};
        } else if (kind == "binning") {
            BinnedModel m;
            m.driver = p.at("driver").get<Index>();
            m.edges = p.at("edges").get<std::vector<double>>();
            for (const auto& b : p.at("bins")) {
                m.per_bin.push_back(json_linear(b.at("model")));
                m.uses_fallback.push_back(b.at("fallback").get<bool>());
            }
            m.fallback = json_linear(p.at("fallback"));
            params = std::move(m);
        } else if (kind == "piecewise") {
            params = PiecewiseModel{p.at("driver").get<Index>(), p.at("knots").get<std::vector<double>>(),
                                    json_linear(p.at("inner"))};
        } else if (kind == "knn") {
            params = KnnModel{json_mat(p.at("train_x")), json_vec(p.at("train_y")), p.at("k").get<int>()};
        } else if (kind == "svr") {
            params = SvrModel{json_mat(p.at("support_vectors")), json_vec(p.at("dual_coefs")),
                              p.at("bias").get<double>(),         p.at("gamma").get<double>(),
                              p.at("C").get<double>(),            p.at("epsilon").get<double>()};
        } else if (kind == "forest") {
            ForestModel m;
            for (const auto& t : p.at("trees")) {
                RegressionTree tree;
                for (const auto& n : t) {
                    tree.nodes.push_back(TreeNode{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                                                  n.at(3).get<int>(), n.at(4).get<double>()});
                }
                m.trees.push_back(std::move(tree));
            }
            params = std::move(m);
        } else {
            throw ConfigError("unknown model kind '" + kind + "'");
        }
        return TrainedModel(std::move(spec), std::move(names), std::move(params));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("model artifact: ") + e.what());
    }
}

} // namespace thermo
