/**
 * @file cost_model.hpp
 * @brief Reporting-cost distribution H on [0, cbar] and the virtual-value
 *        machinery shared by every solver.
 *
 * Houses the CDF/density pair (H, h), the virtual value beta(x) = x + H/h,
 * the information rent H^2/h, their inverses, and the truncated cost mass
 * integral(0..b) x dH(x). Two law kinds are supported:
 *   - uniform on [0, cbar] (closed forms throughout), and
 *   - tabulated laws given as monotone (x, H(x)) samples, evaluated by a
 *     monotone cubic interpolant whose derivative provides the density,
 *     floored at 1e-12 to avoid division blow-ups.
 *
 * Model assumptions enforced at construction: H(0)=0, H(cbar)=1, H strictly
 * increasing, h > 0 on the support, and beta strictly increasing.
 */
#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bandit_bonus/errors.hpp"
#include "bandit_bonus/numerics.hpp"

namespace bb {

class CostDistribution {
  public:
    enum class Kind { UniformOnZeroToCbar, NumericTabulated };

    /// Uniform reporting-cost law on [0, cbar].
    static CostDistribution uniform(double cbar) {
        if (!(cbar > 0.0)) throw InvariantError("cost law: cbar > 0 violated");
        CostDistribution d;
        d.kind_ = Kind::UniformOnZeroToCbar;
        d.cbar_ = cbar;
        return d;
    }

    /**
     * @brief Tabulated law from monotone samples of the CDF.
     *
     * Requires strictly increasing x starting at 0 and ending at the support
     * bound, and strictly increasing H with H(0)=0 and H(cbar)=1 (up to 1e-9,
     * then renormalized exactly). The density is the interpolant's derivative
     * floored at 1e-12; beta-monotonicity is verified on a fine grid.
     */
    static CostDistribution tabulated(std::vector<double> x, std::vector<double> cdf) {
        if (x.size() < 4) throw InvariantError("tabulated cost law: need at least 4 samples");
        if (x.front() != 0.0) throw InvariantError("tabulated cost law: support must start at x = 0");
        if (std::abs(cdf.front()) > 1e-9 || std::abs(cdf.back() - 1.0) > 1e-9)
            throw InvariantError("tabulated cost law: H(0) = 0 and H(cbar) = 1 violated");
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            if (!(x[i + 1] > x[i]) || !(cdf[i + 1] > cdf[i]))
                throw InvariantError("tabulated cost law: samples must be strictly increasing");
        }
        cdf.front() = 0.0;
        cdf.back() = 1.0;
        CostDistribution d;
        d.kind_ = Kind::NumericTabulated;
        d.cbar_ = x.back();
        d.table_ = num::MonotoneCubic(std::move(x), std::move(cdf));
        d.check_virtual_value_monotone();
        return d;
    }

    /**
     * @brief Loads a tabulated law from a two-column CSV of (x, H(x)).
     *
     * A header row is required; both columns must be strictly increasing.
     */
    static CostDistribution tabulated_from_csv(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cost law CSV not readable: " + path);
        std::string line;
        if (!std::getline(in, line)) throw ConfigError("cost law CSV is empty: " + path);
        // Header row: reject files that start with numeric data.
        {
            std::istringstream probe(line);
            double v;
            if (probe >> v) throw ConfigError("cost law CSV must start with a header row: " + path);
        }
        std::vector<double> xs, hs;
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            std::istringstream row(line);
            std::string a, b;
            if (!std::getline(row, a, ',') || !std::getline(row, b))
                throw ConfigError("cost law CSV: expected two comma-separated columns at line " +
                                  std::to_string(line_no));
            try {
                xs.push_back(std::stod(a));
                hs.push_back(std::stod(b));
            } catch (const std::exception&) {
                throw ConfigError("cost law CSV: non-numeric entry at line " + std::to_string(line_no));
            }
        }
        return tabulated(std::move(xs), std::move(hs));
    }

    Kind kind() const { return kind_; }
    double cbar() const { return cbar_; }

    /// (H(x), h(x)) at x in [0, cbar].
    std::pair<double, double> eval(double x) const {
        require_in_support(x);
        if (kind_ == Kind::UniformOnZeroToCbar) return {x / cbar_, 1.0 / cbar_};
        auto [v, dv] = table_.eval(x);
        return {v, std::max(dv, kDensityFloor)};
    }

    double cdf(double x) const { return eval(x).first; }
    double pdf(double x) const { return eval(x).second; }

    /// Virtual value beta(x) = x + H(x)/h(x); strictly increasing, beta(0) = 0.
    double virtual_value(double x) const {
        auto [H, h] = eval(x);
        return x + H / h;
    }

    /// Information rent H(x)^2/h(x); zero at x = 0 and strictly increasing.
    double info_rent(double x) const {
        auto [H, h] = eval(x);
        return H * H / h;
    }

    /**
     * @brief Inverse of the virtual value, extended beyond the support.
     *
     * For 0 <= y <= beta(cbar) returns the unique x in [0, cbar] with
     * beta(x) = y (bisection to 1e-12). For y > beta(cbar) returns y itself:
     * outside the support the recursion operates on the extended branch where
     * the virtual value is the identity. Negative input is an error — callers
     * clamp negative interior bonuses to zero themselves.
     */
    double virtual_inverse(double y) const {
        if (y < 0.0) throw std::domain_error("virtual_inverse: negative input (clamp bonuses first)");
        if (y == 0.0) return 0.0;
        const double top = virtual_value(cbar_);
        if (y >= top) return (y == top) ? cbar_ : y;
        if (kind_ == Kind::UniformOnZeroToCbar) return 0.5 * y; // beta(x) = 2x
        return num::bisect([&](double x) { return virtual_value(x) - y; }, 0.0, cbar_, 1e-12);
    }

    /**
     * @brief Inverse of the information rent on [0, cbar].
     *
     * Throws std::out_of_range when y exceeds info_rent(cbar): along the value
     * recursions that signals the clamped / immediate-revelation regime.
     */
    double info_rent_inverse(double y) const {
        if (y < 0.0) throw std::domain_error("info_rent_inverse: negative input");
        if (y == 0.0) return 0.0;
        const double top = info_rent(cbar_);
        if (y > top) throw std::out_of_range("info_rent_inverse: rent above info_rent(cbar)");
        if (y == top) return cbar_;
        if (kind_ == Kind::UniformOnZeroToCbar) return std::sqrt(cbar_ * y); // H^2/h = x^2/cbar
        return num::bisect([&](double x) { return info_rent(x) - y; }, 0.0, cbar_, 1e-12);
    }

    /// Truncated cost mass integral(0..b) x dH(x) = H(b) E[c | c < b].
    double truncated_cost_mass(double b) const {
        require_in_support(b);
        if (kind_ == Kind::UniformOnZeroToCbar) return 0.5 * b * b / cbar_;
        return num::adaptive_simpson([&](double x) { return x * pdf(x); }, 0.0, b, 1e-10);
    }

    /// Quantile H^{-1}(u) for u in [0, 1]; used by the Monte Carlo samplers.
    double quantile(double u) const {
        if (u < 0.0 || u > 1.0) throw std::domain_error("quantile: u outside [0, 1]");
        if (kind_ == Kind::UniformOnZeroToCbar) return u * cbar_;
        if (u == 0.0) return 0.0;
        if (u == 1.0) return cbar_;
        return num::bisect([&](double x) { return cdf(x) - u; }, 0.0, cbar_, 1e-12);
    }

  private:
    static constexpr double kDensityFloor = 1e-12;

    void require_in_support(double x) const {
        if (x < 0.0 || x > cbar_)
            throw std::domain_error("cost law: argument outside the support [0, cbar]");
    }

    void check_virtual_value_monotone() const {
        // The assumption "beta strictly increasing" cannot be taken for granted
        // for arbitrary tables; verify on a fine grid at load time.
        constexpr int kProbe = 512;
        double prev = virtual_value(0.0);
        for (int i = 1; i <= kProbe; ++i) {
            const double x = cbar_ * static_cast<double>(i) / kProbe;
            const double cur = virtual_value(x);
            if (!(cur > prev))
                throw InvariantError("tabulated cost law: virtual value not strictly increasing");
            prev = cur;
        }
    }

    Kind kind_ = Kind::UniformOnZeroToCbar;
    double cbar_ = 1.0;
    num::MonotoneCubic table_;
};

} // namespace bb
