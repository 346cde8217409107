#pragma once
// Golden reference values used by the unit and acceptance tests.
// Generated data file - do not edit by hand.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace golden {

// ---- transfer-function numerators p(z), ascending coefficients ----
// chi_R(z) = p(z) / p(-z) for each catalogued A-stable scheme.
struct TransferP { int K, R; std::vector<long long> p; };
inline const std::vector<TransferP>& transfer_p() {
  static const std::vector<TransferP> v = {
    {1, 1, {2, 1}},
    {1, 2, {3, 3, 1}},
    {1, 3, {12, 18, 11, 3}},
    {1, 4, {60, 120, 105, 50, 12}},
    {2, 1, {12, 6, 1}},
    {2, 2, {90, 90, 39, 9, 1}},
    {2, 3, {1680, 2520, 1740, 720, 193, 33, 3}},
    {3, 1, {120, 60, 12, 1}},
    {3, 2, {7560, 7560, 3465, 945, 165, 18, 1}},
    {3, 3, {3326400, 4989600, 3553200, 1587600, 494760, 112770, 19075, 2355, 198, 9}}
  };
  return v;
}

// ---- Hurwitz matrices and principal minors for two catalogued schemes ----
inline const std::vector<std::vector<long long>> h13 = {
    {11, 12, 0}, {3, 18, 0}, {0, 11, 12}};
inline const std::vector<long long> h13_minors = {11, 162, 1944};
inline const std::vector<std::vector<long long>> h22 = {
    {9, 90, 0, 0}, {1, 39, 90, 0}, {0, 9, 90, 0}, {0, 1, 39, 90}};
inline const std::vector<long long> h22_minors = {9, 261, 16200, 1458000};

// ---- final-time phase deviation arg(dev), N = 36, T = 1 ----
// rows K = 1..4, columns R = 1..4
inline const double deviation_k1[4][4] = {   // kappa = 1
    {-1.59e-02, -1.29e-04, 7.07e-05, 2.20e-06},
    {-8.08e-06, 1.87e-08, -5.08e-11, 1.61e-13},
    {-1.76e-09, 6.27e-15, 2.61e-18, -5.38e-23},
    {-2.13e-13, -8.88e-20, -5.71e-26, -5.46e-32}};
inline const double deviation_k2[4][4] = {   // kappa = 2
    {-1.25e-01, -4.03e-03, 2.05e-03, 2.64e-04},
    {-2.57e-04, 2.34e-06, -2.46e-08, 2.94e-10},
    {-2.24e-07, 1.27e-11, 2.00e-14, -6.72e-18},
    {-1.09e-10, -7.14e-16, -7.06e-21, -1.01e-25}};

// ---- linear decay benchmark (phi' = -phi, T = 1), K = 1, N = 60 ----
inline const double ode1_k1_n60_errors[5] = {
    8.52e-06, 6.31e-10, 3.55e-10, 1.00e-13, 3.59e-14};   // R = 1..5
inline const double ode1_k1_orders[5] = {2.0, 4.0, 4.0, 6.0, 6.0};

// ---- mean fixed-point iterations, phi' = -phi, eps = 1e-20, N = 60 ----
struct KappaCell { int K, R; double kappa; };
inline const std::vector<KappaCell> ode1_kappa = {
    {1, 1, 9.00}, {1, 2, 5.00}, {1, 3, 3.33}, {1, 4, 2.50}, {1, 5, 2.20},
    {2, 1, 8.00}, {2, 2, 4.50}, {3, 1, 7.00}};

// ---- oscillator benchmark phi' = 2*pi*i*phi, T = 1, N = 60 ----
struct OdeCell { int K, R; double error; };
inline const std::vector<OdeCell> ode2a_cells = {
    {2, 2, 8.75e-10}, {3, 1, 8.22e-11}, {3, 2, 3.80e-17}};

// ---- minimal grid sizes, phi' = 20*pi*i*phi on (0, 0.94] ----
struct MinNCell { int K, R; double eps; long long n; };
inline const std::vector<MinNCell> ode2b_cells = {
    {1, 1, 1e-3, 4144}, {2, 2, 1e-3, 80}};

// ---- Lobatto IIIA tableau rows for (K, R) = (1, 2), DT-normalized ----
inline const std::vector<std::vector<std::pair<long long, long long>>> lobatto = {
    {{5, 24}, {8, 24}, {-1, 24}}, {{1, 6}, {4, 6}, {1, 6}}};

// ---- derivative post-processor coefficient tables ----
// coeffs[i][k] = a_{ik} as an exact fraction {num, den}; solves M^p a = b^p.
struct PpFraction { std::string num, den; };
struct PpFixture { int K, p, Ip; std::vector<std::vector<PpFraction>> coeffs; };
inline const std::vector<PpFixture>& postproc_fixtures() {
  static const std::vector<PpFixture> v = {
    {1, 2, 1, {{{"-6", "1"}, {"4", "1"}}, {{"6", "1"}, {"2", "1"}}}},
    {2, 3, 2, {{{"297", "2"}, {"-72", "1"}, {"27", "2"}}, {{"-192", "1"}, {"-48", "1"}, {"-24", "1"}}, {{"87", "2"}, {"15", "1"}, {"3", "2"}}}},
    {3, 4, 1, {{{"-840", "1"}, {"480", "1"}, {"-120", "1"}, {"16", "1"}}, {{"840", "1"}, {"360", "1"}, {"60", "1"}, {"4", "1"}}}}
  };
  return v;
}

// ---- post-processing consistency on exact exp(t) node data, [0, 1] ----
// (K, p, Ip, N) -> error and observed order when N doubles
inline const double pp_consistency_k1_err = 2.30e-09;   // K=1, p=2, Ip=2, N=60
inline const double pp_consistency_k1_order = 4.0;
inline const double pp_consistency_k3_order = 8.0;      // K=3, p=4, Ip=2

// ---- Van der Pol (mu = 1) substitute cell ----
inline const double ode5a_k2r2_n480_error = 8.93e-13;   // x-component, order 6.0

}  // namespace golden
