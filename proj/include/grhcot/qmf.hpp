#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "grhcot/cotsum.hpp"
#include "grhcot/numkernel.hpp"

namespace grhcot {

// Signed rational, always reduced with den > 0.
struct Fraction {
    i64 num = 0;
    i64 den = 1;

    static Fraction make(i64 num, i64 den);
    double value() const { return double(num) / double(den); }
    ReducedFraction abs() const { return {num < 0 ? -num : num, den}; }
    std::string str() const;

    friend Fraction operator+(const Fraction& a, const Fraction& b);
    friend Fraction operator-(const Fraction& a, const Fraction& b);
    friend Fraction operator*(const Fraction& a, const Fraction& b);
    friend bool operator==(const Fraction&, const Fraction&) = default;
};

double eval_H_rational(const Discriminant& D, const ReducedFraction& x, const PrecisionContext& ctx = {});
double eval_H_rational(const Discriminant& D, const Fraction& x, const PrecisionContext& ctx = {});

// C at rationals is exact; at reals it goes through the piecewise integral.
double eval_C(const Discriminant& D, const Fraction& x, const PrecisionContext& ctx = {});
double eval_C(const Discriminant& D, double x, const PrecisionContext& ctx = {});
Bounded eval_C_quadrature(const Discriminant& D, double x, const PrecisionContext& ctx);

// D = -4: pi/8 + x sum chi(n) d(n) J(pi n x / 2), first N terms.
struct SeriesValue {
    double value = 0;
    double rigorous_bound = 0;  // |J| <= 2/y^2 tail
    double estimate = 0;        // |S_N - S_{N/2}|
    i64 terms = 0;
};
SeriesValue eval_C_jseries(double x, i64 N);
SeriesValue eval_C_jseries(double x, const PrecisionContext& ctx);
double modified_cosine_integral(double y);  // J(y) = -int_y^inf cos t / t^2 dt
double sine_integral(double y);

double eval_Hs(const Discriminant& D, const Fraction& x, double s, const PrecisionContext& ctx = {});
double eval_Hs(const Discriminant& D, double x, double s, const PrecisionContext& ctx = {});
double eval_Cs(const Discriminant& D, const Fraction& x, double s, const PrecisionContext& ctx = {});
Bounded eval_Cs(const Discriminant& D, double x, double s, const PrecisionContext& ctx = {});

// D = -4 only; x in R, eps > 0.
double eval_T_reg(double x, double eps, const PrecisionContext& ctx = {});
double eval_T_reg_expsum(double x, double eps, const PrecisionContext& ctx = {});
double H_abel(double x, double eps, const PrecisionContext& ctx = {});

struct GroupElement {
    enum class Provenance { Residue, Word };

    i64 a = 1, b = 0, c = 0, d = 1;
    Discriminant D{-4};
    int epsilon = 1;
    Provenance provenance = Provenance::Residue;
    std::string word;

    // Accepts only gamma = +-1 or +-S mod |D| inside Gamma_(D).
    static GroupElement from_matrix(const Discriminant& D, i64 a, i64 b, i64 c, i64 d);
    // Tokens S, T, T^k separated by spaces or '*'; T stands for T^u.
    static GroupElement from_word(const Discriminant& D, std::string_view word);

    static i64 translation_step(const Discriminant& D) { return D.even() ? D.modulus() / 2 : D.modulus(); }

    GroupElement operator*(const GroupElement& o) const;
    bool is_pole(const Fraction& x) const { return c * x.num + d * x.den == 0; }
    Fraction act(const Fraction& x) const;
    // |c x + d|
    Fraction automorphy(const Fraction& x) const;
};

double cocycle_C_gamma(const GroupElement& g, const Fraction& x, const PrecisionContext& ctx = {});

enum class ProbeFunction { H, C, CGamma };

struct RadiusSample {
    Fraction radius;
    double left = 0, right = 0;
    double osc_left = 0, osc_right = 0;
    double slope_left = 0, slope_right = 0;
};

struct ContinuityReport {
    ProbeFunction function = ProbeFunction::H;
    Fraction x0;
    double value_at_x0 = 0;
    std::vector<RadiusSample> samples;
    // slope ~ alpha log r + beta on each side
    double log_slope_left = 0, log_slope_right = 0;
    double fit_residual_left = 0, fit_residual_right = 0;
};

// Radii base^{-k}, k = k0..k1, base coprime to the denominator of x0.
std::vector<Fraction> default_radii(const Fraction& x0, int k0, int k1);

ContinuityReport continuity_probe(const Discriminant& D, ProbeFunction f, const Fraction& x0,
                                  const std::vector<Fraction>& radii, const PrecisionContext& ctx = {},
                                  const std::optional<GroupElement>& gamma = std::nullopt);

enum class AsymptoticTarget { H_at_1, C_at_1, C_at_inverse_integers, H_at_alpha };

struct AsymptoticFit {
    AsymptoticTarget target = AsymptoticTarget::H_at_1;
    Fraction alpha{1, 1};
    int side = 1;
    bool half_integer = false;
    double log_coefficient = 0;
    double log_uncertainty = 0;
    std::vector<std::string> labels;
    std::vector<double> constants;
    std::vector<double> uncertainties;
    double residual = 0;
};

struct AsymptoticRequest {
    AsymptoticTarget target = AsymptoticTarget::H_at_1;
    i64 n_min = 40;
    i64 n_max = 800;
    int side = 1;
    bool half_integer = false;
    int terms = 6;
    // H_at_alpha: completion (a b; c d) of alpha = a/c
    i64 a = 1, b = 0, c = 1, d = 1;
    // C_at_inverse_integers: residue of n mod 4
    int residue = 1;
};

AsymptoticFit asymp_fit(const Discriminant& D, const AsymptoticRequest& req, const PrecisionContext& ctx = {});

std::string to_string(AsymptoticTarget t);
std::string to_string(ProbeFunction f);

}  // namespace grhcot
