#include "commdist/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <json.hpp>

#include "commdist/error.hpp"
#include "commdist/kernels.hpp"

namespace commdist {

namespace {

using json = nlohmann::json;

Eigen::MatrixXd samples_matrix(const Dataset& d) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.dim()));
    for (std::size_t n = 0; n < d.size(); ++n)
        x.row(static_cast<Eigen::Index>(n)) = Eigen::Map<const Eigen::RowVectorXd>(d.x[n].data(), x.cols());
    return x;
}

void unpack(const Eigen::VectorXd& p, Eigen::Index k, Eigen::Index g, Eigen::MatrixXd& w, Eigen::VectorXd& b) {
    w = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(p.data(), k, g);
    b = p.tail(k);
}

Eigen::VectorXd pack(const Eigen::MatrixXd& w, const Eigen::VectorXd& b) {
    Eigen::VectorXd p(w.size() + b.size());
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> wr = w;
    p.head(w.size()) = Eigen::Map<const Eigen::VectorXd>(wr.data(), w.size());
    p.tail(b.size()) = b;
    return p;
}

/// Row-wise softmax of P×K logits, stabilised by the row maximum.
Eigen::MatrixXd softmax_rows(Eigen::MatrixXd z) {
    for (Eigen::Index n = 0; n < z.rows(); ++n) {
        z.row(n).array() -= z.row(n).maxCoeff();
        z.row(n) = z.row(n).array().exp().matrix();
        z.row(n) /= z.row(n).sum();
    }
    return z;
}

std::vector<double> softmax(std::vector<double> z) {
    const double zmax = *std::max_element(z.begin(), z.end());
    double s = 0;
    for (double& v : z) s += (v = std::exp(v - zmax));
    for (double& v : z) v /= s;
    return z;
}

std::vector<double> logits(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, std::span<const double> x) {
    // W is column-major; gemv wants row-major.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> wr = w;
    std::vector<double> z(static_cast<std::size_t>(w.rows()));
    kernels::gemv(z.size(), x.size(), std::span<const double>(wr.data(), static_cast<std::size_t>(wr.size())), x, z);
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += b(static_cast<Eigen::Index>(k));
    return z;
}

Eigen::VectorXd json_vector(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

Objective objective_and_gradient(const Eigen::MatrixXd& x, std::span<const std::size_t> labels, std::size_t classes,
                                 const Eigen::VectorXd& params, double l2) {
    const Eigen::Index k = static_cast<Eigen::Index>(classes), g = x.cols();
    Eigen::MatrixXd w;
    Eigen::VectorXd b;
    unpack(params, k, g, w, b);

    Eigen::MatrixXd z = x * w.transpose();
    z.rowwise() += b.transpose();
    double loss = 0;
    for (Eigen::Index n = 0; n < z.rows(); ++n) {
        const double zmax = z.row(n).maxCoeff();
        const double lse = zmax + std::log((z.row(n).array() - zmax).exp().sum());
        loss += lse - z(n, static_cast<Eigen::Index>(labels[static_cast<std::size_t>(n)]));
    }
    Eigen::MatrixXd r = softmax_rows(z);  // P×K residual p − t
    for (Eigen::Index n = 0; n < r.rows(); ++n) r(n, static_cast<Eigen::Index>(labels[static_cast<std::size_t>(n)])) -= 1.0;

    Objective out;
    out.value = loss + 0.5 * l2 * w.squaredNorm();
    out.gradient = pack(r.transpose() * x + l2 * w, r.colwise().sum().transpose());
    return out;
}

LogRegModel train(const Dataset& data, const TrainOptions& opts, TrainReport* report) {
    data.validate();
    if (data.size() == 0) throw Error(ErrorKind::TooFewSamples, "training set is empty");
    if (!(opts.l2 >= 0)) throw Error(ErrorKind::SchemaError, "l2 must be non-negative");
    const Eigen::MatrixXd x = samples_matrix(data);
    if (!x.allFinite()) throw Error(ErrorKind::NonFinite, "training features have non-finite entries");
    const Eigen::Index k = static_cast<Eigen::Index>(data.classes()), g = x.cols();

    Eigen::VectorXd p = Eigen::VectorXd::Zero(k * g + k);
    Objective cur = objective_and_gradient(x, data.labels, data.classes(), p, opts.l2);
    TrainReport rep;
    rep.history.push_back(cur.value);
    double step = 1.0;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        if (cur.gradient.lpNorm<Eigen::Infinity>() <= opts.tol) {
            rep.converged = true;
            break;
        }
        const double g2 = cur.gradient.squaredNorm();
        Objective next;
        Eigen::VectorXd trial;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            trial = p - step * cur.gradient;
            next = objective_and_gradient(x, data.labels, data.classes(), trial, opts.l2);
            if (std::isfinite(next.value) && next.value <= cur.value - 1e-4 * step * g2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (!std::isfinite(next.value)) throw Error(ErrorKind::NonFinite, "objective diverged during line search");
            break;  // no further decrease is representable
        }
        p = std::move(trial);
        cur = std::move(next);
        rep.history.push_back(cur.value);
        step *= 2.0;
    }
    if (!std::isfinite(cur.value) || !p.allFinite()) throw Error(ErrorKind::NonFinite, "training produced non-finite parameters");

    LogRegModel m;
    unpack(p, k, g, m.w, m.b);
    m.l2 = opts.l2;
    m.class_names = data.class_names;
    if (data.reducer) m.basis_hash = data.reducer->hash();

    if (opts.laplace) {
        const Eigen::MatrixXd z = (x * m.w.transpose()).rowwise() + m.b.transpose();
        const Eigen::MatrixXd pr = softmax_rows(z);
        const Eigen::MatrixXd s = (pr.array() * (1.0 - pr.array())).matrix();  // P×K
        const Eigen::MatrixXd hw = s.transpose() * x.array().square().matrix();  // K×G
        Eigen::VectorXd h = pack(hw, s.colwise().sum().transpose());
        m.laplace_var = (h.array() + opts.l2).inverse().matrix();
        for (Eigen::Index j = 0; j < m.laplace_var->size(); ++j)
            if (!std::isfinite((*m.laplace_var)(j))) (*m.laplace_var)(j) = 0.0;  // l2 = 0 with a flat direction
    }

    rep.iterations = it;
    rep.objective = cur.value;
    rep.grad_norm = cur.gradient.lpNorm<Eigen::Infinity>();
    if (report) *report = std::move(rep);
    return m;
}

std::vector<double> predict_proba(const LogRegModel& model, std::span<const double> x) {
    if (x.size() != model.dim())
        throw Error(ErrorKind::DimensionMismatch, "input has length " + std::to_string(x.size()) + ", model expects " +
                                                      std::to_string(model.dim()));
    return softmax(logits(model.w, model.b, x));
}

std::size_t predict(const LogRegModel& model, std::span<const double> x) {
    const auto p = predict_proba(model, x);
    return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

std::vector<std::vector<double>> predict_distribution(const LogRegModel& model, std::span<const double> x,
                                                      std::size_t samples, std::uint64_t seed) {
    if (!model.laplace_var) throw Error(ErrorKind::MissingLaplace, "model has no Laplace covariance");
    if (samples < 1) throw Error(ErrorKind::SchemaError, "need at least one sample");
    if (x.size() != model.dim())
        throw Error(ErrorKind::DimensionMismatch, "input has length " + std::to_string(x.size()) + ", model expects " +
                                                      std::to_string(model.dim()));
    const Eigen::Index k = model.w.rows(), g = model.w.cols();
    const Eigen::VectorXd mean = pack(model.w, model.b);
    const Eigen::VectorXd sd = model.laplace_var->cwiseSqrt();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<std::vector<double>> out(static_cast<std::size_t>(k), std::vector<double>(samples));
    Eigen::VectorXd draw(mean.size());
    Eigen::MatrixXd w;
    Eigen::VectorXd b;
    for (std::size_t s = 0; s < samples; ++s) {
        for (Eigen::Index j = 0; j < draw.size(); ++j) draw(j) = mean(j) + sd(j) * normal(rng);
        unpack(draw, k, g, w, b);
        const auto p = softmax(logits(w, b, x));
        for (std::size_t c = 0; c < p.size(); ++c) out[c][s] = p[c];
    }
    return out;
}

Evaluation evaluate(const LogRegModel& model, const Dataset& test) {
    test.validate();
    Evaluation e;
    const std::size_t kc = std::max(model.classes(), test.classes());
    e.confusion.assign(kc, std::vector<std::size_t>(kc, 0));
    std::size_t correct = 0;
    for (std::size_t n = 0; n < test.size(); ++n) {
        const std::size_t pred = predict(model, test.x[n]);
        ++e.confusion[test.labels[n]][pred];
        correct += pred == test.labels[n];
    }
    e.accuracy = test.size() ? static_cast<double>(correct) / static_cast<double>(test.size()) : 0.0;
    return e;
}

std::string model_to_json(const LogRegModel& m) {
    json j;
    j["classes"] = m.classes();
    j["dim"] = m.dim();
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> wr = m.w;
    json rows = json::array();
    for (Eigen::Index r = 0; r < wr.rows(); ++r)
        rows.push_back(std::vector<double>(wr.row(r).data(), wr.row(r).data() + wr.cols()));
    j["weights"] = rows;
    j["biases"] = std::vector<double>(m.b.data(), m.b.data() + m.b.size());
    j["l2"] = m.l2;
    j["laplace_variance"] = m.laplace_var
                                ? json(std::vector<double>(m.laplace_var->data(), m.laplace_var->data() + m.laplace_var->size()))
                                : json(nullptr);
    j["class_names"] = m.class_names;
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(m.basis_hash));
    j["basis_hash"] = hex;
    return j.dump(2) + "\n";
}

LogRegModel parse_model_json(std::string_view text) {
    LogRegModel m;
    try {
        const json j = json::parse(text);
        const auto rows = j.at("weights").get<std::vector<std::vector<double>>>();
        const Eigen::Index k = static_cast<Eigen::Index>(rows.size());
        const Eigen::Index g = k ? static_cast<Eigen::Index>(rows[0].size()) : 0;
        m.w.resize(k, g);
        for (Eigen::Index r = 0; r < k; ++r) {
            if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != g)
                throw Error(ErrorKind::SchemaError, "model weights are ragged");
            for (Eigen::Index c = 0; c < g; ++c) m.w(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
        m.b = json_vector(j.at("biases"));
        if (m.b.size() != k) throw Error(ErrorKind::SchemaError, "model has " + std::to_string(m.b.size()) + " biases for " + std::to_string(k) + " classes");
        m.l2 = j.at("l2").get<double>();
        if (!j.at("laplace_variance").is_null()) {
            m.laplace_var = json_vector(j["laplace_variance"]);
            if (m.laplace_var->size() != k * g + k) throw Error(ErrorKind::SchemaError, "laplace_variance has the wrong length");
        }
        m.class_names = j.at("class_names").get<std::vector<std::string>>();
        m.basis_hash = std::stoull(j.at("basis_hash").get<std::string>(), nullptr, 16);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::SchemaError, std::string("model JSON: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw Error(ErrorKind::SchemaError, "model JSON: basis_hash is not hexadecimal");
    }
    return m;
}

}  // namespace commdist
