#include "snn/law.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "snn/errors.hpp"

namespace snn {

Law1d Law1d::point_mass(double v) { return discrete({v}, {1.0}); }

Law1d Law1d::rademacher() { return discrete({-1.0, 1.0}, {0.5, 0.5}); }

Law1d Law1d::discrete(std::vector<double> atoms, std::vector<double> weights) {
    Law1d l;
    l.kind = Kind::Discrete;
    l.atoms = std::move(atoms);
    l.weights = std::move(weights);
    return l;
}

Law1d Law1d::uniform(double a, double b) {
    Law1d l;
    l.kind = Kind::Uniform;
    l.lo = a;
    l.hi = b;
    l.atoms.clear();
    l.weights.clear();
    return l;
}

Law1d Law1d::normal(double mean, double sd) {
    Law1d l;
    l.kind = Kind::Normal;
    l.mu = mean;
    l.sd = sd;
    l.atoms.clear();
    l.weights.clear();
    return l;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

double to_double(const std::string& s) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw DomainError("");
        return v;
    } catch (const std::exception&) {
        throw DomainError("malformed number '" + s + "' in law specification");
    }
}

}  // namespace

Law1d Law1d::parse(const std::string& text) {
    if (text == "rademacher") return rademacher();
    auto parts = split(text, ':');
    if (parts.empty()) throw DomainError("empty law specification");
    const std::string& head = parts[0];
    if (head == "point" && parts.size() == 2) return point_mass(to_double(parts[1]));
    if (head == "uniform" && parts.size() == 3) return uniform(to_double(parts[1]), to_double(parts[2]));
    if (head == "normal" && parts.size() == 3) return normal(to_double(parts[1]), to_double(parts[2]));
    if (head == "discrete" && parts.size() == 2) {
        std::vector<double> a, w;
        for (const auto& item : split(parts[1], ',')) {
            auto aw = split(item, '/');
            if (aw.size() != 2) throw DomainError("discrete law items must be atom/weight");
            a.push_back(to_double(aw[0]));
            w.push_back(to_double(aw[1]));
        }
        return discrete(a, w);
    }
    throw DomainError("unknown law specification '" + text + "'");
}

double Law1d::mean() const {
    switch (kind) {
        case Kind::Discrete: {
            double m = 0.0;
            for (std::size_t i = 0; i < atoms.size(); ++i) m += atoms[i] * weights[i];
            return m;
        }
        case Kind::Uniform: return 0.5 * (lo + hi);
        case Kind::Normal: return mu;
    }
    return 0.0;
}

double Law1d::radius() const {
    switch (kind) {
        case Kind::Discrete: {
            double r = 0.0;
            for (double a : atoms) r = std::max(r, std::abs(a));
            return r;
        }
        case Kind::Uniform: return std::max(std::abs(lo), std::abs(hi));
        case Kind::Normal: return std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

double Law1d::sample(Rng& rng) const {
    switch (kind) {
        case Kind::Discrete: {
            if (atoms.size() == 1) return atoms[0];
            double u = uniform01(rng), acc = 0.0;
            for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
                acc += weights[i];
                if (u < acc) return atoms[i];
            }
            return atoms.back();
        }
        case Kind::Uniform: return lo + (hi - lo) * uniform01(rng);
        case Kind::Normal: return mu + sd * standard_normal(rng);
    }
    return 0.0;
}

std::string Law1d::describe() const {
    std::ostringstream o;
    o.precision(17);
    switch (kind) {
        case Kind::Discrete:
            if (atoms.size() == 2 && atoms[0] == -1.0 && atoms[1] == 1.0 && weights[0] == 0.5 &&
                weights[1] == 0.5)
                return "rademacher";
            if (atoms.size() == 1) {
                o << "point:" << atoms[0];
                return o.str();
            }
            o << "discrete:";
            for (std::size_t i = 0; i < atoms.size(); ++i)
                o << (i ? "," : "") << atoms[i] << "/" << weights[i];
            return o.str();
        case Kind::Uniform: o << "uniform:" << lo << ":" << hi; return o.str();
        case Kind::Normal: o << "normal:" << mu << ":" << sd; return o.str();
    }
    return "";
}

void Law1d::validate(bool require_mean_zero, bool require_bounded) const {
    if (kind == Kind::Discrete) {
        if (atoms.empty() || atoms.size() != weights.size())
            throw DomainError("discrete law needs matching non-empty atoms and weights");
        double s = 0.0;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if (!std::isfinite(atoms[i]) || !(weights[i] >= 0.0))
                throw DomainError("discrete law has a non-finite atom or negative weight");
            s += weights[i];
        }
        if (std::abs(s - 1.0) > 1e-12) throw DomainError("discrete law weights must sum to 1");
    } else if (kind == Kind::Uniform) {
        if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
            throw DomainError("uniform law needs finite lo < hi");
    } else if (!(sd > 0.0)) {
        throw DomainError("normal law needs positive standard deviation");
    }
    if (require_bounded && !bounded())
        throw DomainError("law " + describe() + " has unbounded support");
    if (require_mean_zero && std::abs(mean()) > 1e-12)
        throw DomainError("law " + describe() + " is not mean-zero");
}

InitLaw InitLaw::with_frozen_w1(int n1, int d, std::uint64_t seed) const {
    if (n1 < 1 || d < 1) throw DomainError("frozen first layer needs N1 >= 1 and d >= 1");
    InitLaw out = *this;
    Rng rng = make_rng(seed, 0x57A1ULL);
    Eigen::MatrixXd w(n1, d);
    for (int j = 0; j < n1; ++j)
        for (int k = 0; k < d; ++k) w(j, k) = w1.sample(rng);
    out.w1_atoms = std::move(w);
    return out;
}

void InitLaw::validate_for_init() const {
    c.validate(false, true);
    w2.validate(false, true);
    w1.validate(false, true);
}

void InitLaw::validate_for_limit(int n1) const {
    c.validate(true, true);
    w2.validate(true, true);
    if (!w1_atoms) throw DomainError("limit measure needs frozen first-layer atoms");
    if (w1_atoms->rows() != n1)
        throw DomainError("frozen first-layer atoms have " + std::to_string(w1_atoms->rows()) +
                          " rows, expected N1 = " + std::to_string(n1));
    if (!w1_atoms->allFinite()) throw DomainError("frozen first-layer atoms are not finite");
}

}  // namespace snn
