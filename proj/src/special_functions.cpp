#include "ashape/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>

#include <json.hpp>

namespace ashape::sf {

double mv_gamma_ln(double beta, int m, double a) {
    if (m < 1) throw std::invalid_argument("mv_gamma_ln: m must be >= 1");
    if (beta <= 0) throw std::invalid_argument("mv_gamma_ln: beta must be positive");
    if (!(a > (m - 1) * beta / 2.0))
        throw std::invalid_argument("mv_gamma_ln: requires a > (m-1) beta/2, a = " +
                                    std::to_string(a));
    double s = 0.25 * m * (m - 1) * beta * std::log(M_PI);
    for (int i = 0; i < m; ++i) s += std::lgamma(a - 0.5 * i * beta);
    return s;
}

double gen_pochhammer(double beta, double a, const Partition& kappa) {
    double prod = 1.0;
    for (int i = 1; i <= kappa.length(); ++i) {
        const double base = a - 0.5 * (i - 1) * beta;
        for (int j = 0; j < kappa.part(i); ++j) {
            const double factor = base + j;
            if (factor == 0.0) return 0.0;
            prod *= factor;
        }
    }
    return prod;
}

double stiefel_volume_ln(double beta, int m, int n) {
    if (m > n) throw std::invalid_argument("stiefel_volume_ln: requires m <= n");
    if (m < 1) throw std::invalid_argument("stiefel_volume_ln: m must be >= 1");
    return m * std::log(2.0) + 0.5 * m * n * beta * std::log(M_PI) -
           mv_gamma_ln(beta, m, 0.5 * n * beta);
}

namespace {

double rho_alpha(const Partition& p, double beta) {
    // eigenvalue of the Laplace-Beltrami recursion, n-independent part
    double r = 0.0;
    for (int i = 1; i <= p.length(); ++i)
        r += p.part(i) * (p.part(i) - 1.0 - beta * (i - 1));
    return r;
}

// ln of alpha^k k! / prod_{s in lambda} (alpha (arm(s)+1) + leg(s)),
// the factor converting the monic P_lambda row into the C normalization.
double c_norm_log(const Partition& lambda, double alpha) {
    const int k = lambda.weight();
    double s = k * std::log(alpha) + std::lgamma(k + 1.0);
    for (int i = 1; i <= lambda.length(); ++i)
        for (int j = 1; j <= lambda.part(i); ++j) {
            const int arm = lambda.part(i) - j;
            int leg = 0;
            for (int r = i + 1; r <= lambda.length(); ++r)
                if (lambda.part(r) >= j) ++leg;
            s -= std::log(alpha * (arm + 1) + leg);
        }
    return s;
}

}  // namespace

JackTable::JackTable(double beta, int max_weight, int max_parts)
    : beta_(beta), max_weight_(max_weight), max_parts_(max_parts) {
    if (beta <= 0) throw std::invalid_argument("JackTable: beta must be positive");
    if (max_weight < 0 || max_parts < 1)
        throw std::invalid_argument("JackTable: bad table size");
    build();
}

void JackTable::build() {
    const double alpha = 2.0 / beta_;
    parts_by_weight_.resize(max_weight_ + 1);
    rows_.resize(max_weight_ + 1);
    for (int k = 0; k <= max_weight_; ++k) {
        auto& plist = parts_by_weight_[k];
        plist = partitions_of(k, max_parts_);
        const int np = static_cast<int>(plist.size());
        std::map<std::vector<int>, int> index;
        for (int i = 0; i < np; ++i) index.emplace(plist[i].parts(), i);
        std::vector<double> rho(np);
        for (int i = 0; i < np; ++i) rho[i] = rho_alpha(plist[i], beta_);

        rows_[k].resize(np);
        std::vector<double> row(np);
        for (int a = 0; a < np; ++a) {
            std::fill(row.begin(), row.end(), 0.0);
            row[a] = 1.0;  // monic in the dominance-leading monomial
            for (int b = a + 1; b < np; ++b) {
                const Partition& mu = plist[b];
                if (!dominated_by(mu, plist[a])) continue;
                double acc = 0.0;
                const int len = mu.length();
                std::vector<int> nu_raw(mu.parts());
                for (int i = 0; i < len - 1; ++i)
                    for (int j = i + 1; j < len; ++j)
                        for (int t = 1; t <= mu.part(j + 1); ++t) {
                            nu_raw = mu.parts();
                            nu_raw[i] += t;
                            nu_raw[j] -= t;
                            std::sort(nu_raw.begin(), nu_raw.end(), std::greater<int>());
                            while (!nu_raw.empty() && nu_raw.back() == 0) nu_raw.pop_back();
                            auto it = index.find(nu_raw);
                            if (it == index.end()) continue;  // longer than max_parts
                            const int nb = it->second;
                            if (nb < a || row[nb] == 0.0) continue;
                            if (!dominated_by(plist[nb], plist[a])) continue;
                            acc += (mu.part(i + 1) + t - (mu.part(j + 1) - t)) * row[nb];
                        }
                row[b] = beta_ * acc / (rho[a] - rho[b]);
            }
            const double scale = std::exp(c_norm_log(plist[a], alpha));
            auto& sparse = rows_[k][a];
            for (int b = 0; b < np; ++b)
                if (row[b] != 0.0) sparse.emplace_back(b, row[b] * scale);
        }
    }
}

std::vector<double> JackTable::monomial_values(int k, std::span<const double> eigenvalues) const {
    const auto& plist = parts_by_weight_[k];
    const int nvars = static_cast<int>(eigenvalues.size());
    std::vector<double> vals(plist.size(), 0.0);
    std::vector<int> expo;
    for (size_t p = 0; p < plist.size(); ++p) {
        const Partition& mu = plist[p];
        if (mu.length() > nvars) continue;  // monomial vanishes
        expo.assign(nvars, 0);
        for (int i = 0; i < mu.length(); ++i) expo[i] = mu.part(i + 1);
        std::sort(expo.begin(), expo.end());  // ascending for next_permutation
        double sum = 0.0;
        do {
            double term = 1.0;
            for (int i = 0; i < nvars; ++i) {
                const int e = expo[i];
                if (e == 0) continue;
                double base = eigenvalues[i];
                double powed = 1.0;
                for (int r = 0; r < e; ++r) powed *= base;
                term *= powed;
            }
            sum += term;
        } while (std::next_permutation(expo.begin(), expo.end()));
        vals[p] = sum;
    }
    return vals;
}

const std::vector<Partition>& JackTable::partitions(int k) const {
    if (k < 0 || k > max_weight_)
        throw std::invalid_argument("JackTable: weight exceeds table");
    return parts_by_weight_[k];
}

double JackTable::evaluate(const Partition& kappa, std::span<const double> eigenvalues) const {
    const int k = kappa.weight();
    if (k > max_weight_)
        throw std::invalid_argument("JackTable: weight " + std::to_string(k) +
                                    " exceeds table max " + std::to_string(max_weight_));
    if (static_cast<int>(eigenvalues.size()) > max_parts_)
        throw std::invalid_argument("JackTable: more eigenvalues than table max_parts");
    if (kappa.length() > static_cast<int>(eigenvalues.size())) return 0.0;
    const auto& plist = parts_by_weight_[k];
    int idx = -1;
    for (size_t i = 0; i < plist.size(); ++i)
        if (plist[i] == kappa) {
            idx = static_cast<int>(i);
            break;
        }
    if (idx < 0) throw std::invalid_argument("JackTable: partition not in table");
    const std::vector<double> mvals = monomial_values(k, eigenvalues);
    double v = 0.0;
    for (const auto& [b, c] : rows_[k][idx]) v += c * mvals[b];
    return v;
}

std::vector<double> JackTable::evaluate_weight(int k, std::span<const double> eigenvalues) const {
    if (k > max_weight_) throw std::invalid_argument("JackTable: weight exceeds table");
    if (static_cast<int>(eigenvalues.size()) > max_parts_)
        throw std::invalid_argument("JackTable: more eigenvalues than table max_parts");
    const std::vector<double> mvals = monomial_values(k, eigenvalues);
    const auto& plist = parts_by_weight_[k];
    std::vector<double> out(plist.size(), 0.0);
    for (size_t a = 0; a < plist.size(); ++a) {
        double v = 0.0;
        for (const auto& [b, c] : rows_[k][a]) v += c * mvals[b];
        out[a] = v;
    }
    return out;
}

void JackTable::save_json(const std::string& path) const {
    nlohmann::json tables = nlohmann::json::object();
    for (int k = 0; k <= max_weight_; ++k) {
        const auto& plist = parts_by_weight_[k];
        for (size_t a = 0; a < plist.size(); ++a) {
            nlohmann::json row = nlohmann::json::object();
            for (const auto& [b, c] : rows_[k][a]) row[plist[b].to_string()] = c;
            tables[plist[a].to_string()] = std::move(row);
        }
    }
    nlohmann::json j{{"beta", beta_}, {"max_weight", max_weight_}, {"tables", std::move(tables)}};
    std::ofstream os(path);
    if (!os) throw std::runtime_error("JackTable: cannot write " + path);
    os << j.dump();
}

JackTable JackTable::load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("JackTable: cannot read " + path);
    nlohmann::json j;
    is >> j;
    JackTable t;
    t.beta_ = j.at("beta").get<double>();
    t.max_weight_ = j.at("max_weight").get<int>();
    const auto& tables = j.at("tables");
    int max_parts = 1;
    for (auto it = tables.begin(); it != tables.end(); ++it)
        max_parts = std::max(max_parts, Partition::parse(it.key()).length());
    t.max_parts_ = max_parts;
    t.parts_by_weight_.resize(t.max_weight_ + 1);
    t.rows_.resize(t.max_weight_ + 1);
    for (int k = 0; k <= t.max_weight_; ++k) {
        auto& plist = t.parts_by_weight_[k];
        plist = partitions_of(k, max_parts);
        std::map<std::string, int> index;
        for (size_t i = 0; i < plist.size(); ++i) index.emplace(plist[i].to_string(), i);
        t.rows_[k].resize(plist.size());
        for (size_t a = 0; a < plist.size(); ++a) {
            const auto it = tables.find(plist[a].to_string());
            if (it == tables.end())
                throw std::runtime_error("JackTable: cache missing partition " +
                                         plist[a].to_string());
            for (auto mit = it->begin(); mit != it->end(); ++mit)
                t.rows_[k][a].emplace_back(index.at(mit.key()), mit->get<double>());
        }
    }
    return t;
}

namespace {

std::mutex g_jack_mutex;
std::map<std::pair<double, int>, std::shared_ptr<const JackTable>> g_jack_cache;

std::string cache_file_name(double beta, int max_weight, int max_parts) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "jack-beta%g-w%d-p%d.json", beta, max_weight, max_parts);
    return buf;
}

}  // namespace

std::shared_ptr<const JackTable> jack_table(double beta, int max_weight, int max_parts) {
    // round the weight up so repeated slightly-larger requests reuse one table
    const int w = std::max(max_weight, 6);
    const int rounded = ((w + 9) / 10) * 10;
    std::lock_guard<std::mutex> lock(g_jack_mutex);
    auto key = std::make_pair(beta, max_parts);
    auto it = g_jack_cache.find(key);
    if (it != g_jack_cache.end() && it->second->max_weight() >= max_weight) return it->second;

    std::shared_ptr<const JackTable> built;
    if (const char* dir = std::getenv("ASHAPE_JACK_CACHE")) {
        const std::string path =
            std::string(dir) + "/" + cache_file_name(beta, rounded, max_parts);
        std::ifstream probe(path);
        if (probe.good()) {
            try {
                built = std::make_shared<JackTable>(JackTable::load_json(path));
            } catch (const std::exception&) {
                built.reset();  // stale or corrupt cache entry; rebuild below
            }
        }
        if (built && (built->max_weight() < max_weight || built->max_parts() < max_parts))
            built.reset();
        if (!built) {
            built = std::make_shared<JackTable>(beta, rounded, max_parts);
            try {
                built->save_json(path);
            } catch (const std::exception&) {
                // cache directory not writable; keep the in-memory table
            }
        }
    } else {
        built = std::make_shared<JackTable>(beta, rounded, max_parts);
    }
    g_jack_cache[key] = built;
    return built;
}

double jack_c(double beta, const Partition& kappa, std::span<const double> eigenvalues) {
    auto table = jack_table(beta, kappa.weight(),
                            std::max<int>(1, static_cast<int>(eigenvalues.size())));
    return table->evaluate(kappa, eigenvalues);
}

HypergeometricResult hypergeometric_matrix(const HypergeometricSpec& spec,
                                           std::span<const double> eigenvalues) {
    if (eigenvalues.empty())
        throw std::invalid_argument("hypergeometric_matrix: no eigenvalues");
    if (spec.max_weight < 0 || spec.tol <= 0)
        throw std::invalid_argument("hypergeometric_matrix: bad truncation settings");
    const int m = static_cast<int>(eigenvalues.size());

    // exact cut: an upper parameter that is a nonpositive integer -n zeroes
    // every term with k_1 > n
    int cut = -1;
    for (double a : spec.upper) {
        const double r = std::round(a);
        if (a <= 1e-9 && std::abs(a - r) < 1e-9) {
            const int n = static_cast<int>(-r);
            cut = (cut < 0) ? n : std::min(cut, n);
        }
    }
    const bool terminated = cut >= 0 && cut * m <= spec.max_weight;
    const int last_k = (cut >= 0) ? std::min(spec.max_weight, cut * m) : spec.max_weight;

    auto table = jack_table(spec.beta, last_k, m);

    HypergeometricResult res;
    res.terminated = terminated;
    double sum = 0.0, comp = 0.0;  // compensated accumulation over shells
    double factorial = 1.0;
    for (int k = 0; k <= last_k; ++k) {
        if (k > 0) factorial *= k;
        const auto& plist = table->partitions(k);
        const std::vector<double> cvals = table->evaluate_weight(k, eigenvalues);
        double shell = 0.0;
        for (size_t idx = 0; idx < plist.size(); ++idx) {
            const Partition& kappa = plist[idx];
            if (cut >= 0 && kappa.part(1) > cut) continue;
            if (kappa.length() > m) continue;
            double num = 1.0;
            for (double a : spec.upper) num *= gen_pochhammer(spec.beta, a, kappa);
            double den = 1.0;
            for (double b : spec.lower) den *= gen_pochhammer(spec.beta, b, kappa);
            if (den == 0.0) {
                if (num == 0.0) continue;  // killed by the numerator first
                throw PoleError("hypergeometric_matrix: lower parameter pole at kappa = " +
                                kappa.to_string());
            }
            shell += num / den * cvals[idx] / factorial;
        }
        res.shell_sums.push_back(shell);
        const double y = shell - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        res.shells_used = k + 1;
        res.last_shell_abs = std::abs(shell);
        if (cut < 0 && k >= 2) {
            const double scale = std::max(std::abs(sum), 1e-300);
            if (std::abs(res.shell_sums[k]) < spec.tol * scale &&
                std::abs(res.shell_sums[k - 1]) < spec.tol * scale)
                break;
        }
    }
    res.value = sum;
    if (terminated) res.last_shell_abs = 0.0;
    if (!terminated) {
        const double scale = std::max(std::abs(res.value), 1e-300);
        if (res.last_shell_abs > spec.tol * scale)
            throw ConvergenceError(
                "hypergeometric_matrix: truncation estimate " +
                std::to_string(res.last_shell_abs) + " above tolerance at M = " +
                std::to_string(spec.max_weight));
    }
    return res;
}

double hypergeometric_value(const HypergeometricSpec& spec,
                            std::span<const double> eigenvalues) {
    return hypergeometric_matrix(spec, eigenvalues).value;
}

}  // namespace ashape::sf
