# declab/core/envelope_config.py
# Fallback frozen envelopes, used when data/envelopes.csv is missing or unreadable.

# rule "upper": measured <= value; rule "lower": measured >= value
# rule "stable": |measured / value - 1| <= ENVELOPE_STABILITY; value None is frozen on first measurement
ENVELOPES = {
    # 📐 Weight calculus (exponent 100)
    "weight_convolution_upper": {"value": 1e4, "rule": "upper",
                                 "note": "sup (w_R * w_R')/(R'^2 w_R); integrand <= w_R(x) on the grid"},
    "weight_convolution_lower": {"value": 1e-25, "rule": "lower",
                                 "note": "inf (1_B * w_B)/(R^2 w_B) >= |B nodes| h^2 R^-2 (1+1/sqrt2)^-100"},
    "weight_convolution_sup_r1": {"value": None, "rule": "stable", "note": "R=R'=1, grid spacing 1/8 extent 8"},
    "weight_convolution_inf_r1": {"value": None, "rule": "stable", "note": "R=R'=1, grid spacing 1/8 extent 8"},
    "subweights_side4_r1": {"value": 1e25, "rule": "upper",
                            "note": "sum w_Delta / w_B <= 16 (1+1/sqrt2)^100"},
    "subweights_side4_r1_measured": {"value": None, "rule": "stable",
                                     "note": "B side 4, r=1, grid spacing 1/4 extent 4"},
    "subweights_far_point_side4_r1": {"value": None, "rule": "stable",
                                      "note": "sum w_Delta / w_B at x=(400,0), B side 4, r=1"},
    "tiling_intersection": {"value": 2.5, "rule": "upper",
                            "note": "|P_J1 cap P_J2| nu^(2b+1) <= strip bound w^2/sin(angle)"},
    "tiling_constant_random_pairs": {"value": None, "rule": "stable",
                                     "note": "max over 1000 nu-separated pairs, nu in {1/8,1/16}, b in {1,2}, seed 11"},

    # 🌊 Extension operators
    "reverse_holder_q4": {"value": 100.0, "rule": "upper", "note": "g=1, J=[0,1/8], side 8, p=2"},
    "reverse_holder_qinf": {"value": 1e3, "rule": "upper", "note": "g=1, J=[0,1/8], side 8, p=2"},
    "reverse_holder_q4_measured": {"value": None, "rule": "stable", "note": "g=1, J=[0,1/8], side 8, p=2"},
    "reverse_holder_qinf_measured": {"value": None, "rule": "stable", "note": "g=1, J=[0,1/8], side 8, p=2"},

    # 🧪 Decoupling lab
    "ball_inflation_single_child": {"value": 1.0, "rule": "upper",
                                    "note": "g=1, Delta' centred at 0, residual after nu^-1 log^(p/2)"},
    "ball_inflation_nu8_draws32": {"value": None, "rule": "stable",
                                   "note": "b=1, nu=1/8, p=5, I1=[0,1/8], I2=[1/2,5/8], Delta' side 64, "
                                           "max over random:32 seed 7"},
    "bilinear_delta16_nu4": {"value": None, "rule": "stable",
                             "note": "delta=1/16, nu=1/4, I=[0,1/4], I2=[1/2,3/4], p=5, g=1; p-th root"},
    "reduction_constant_delta8_nu4": {"value": None, "rule": "stable",
                                      "note": "delta=1/8, nu=1/4, p=5, constant + random:2 seed 3"},
    "almost_multiplicative_measured": {"value": None, "rule": "stable",
                                       "note": "D-hat over delta in {1/2,1/4,1/8}, p=5, constant + random:4 seed 7"},

    # 🔢 Correlations
    "sqrt_cancellation_excess": {"value": 1.75, "rule": "upper",
                                 "note": "e(R) <= log(2N+3)/log N for N >= 4"},
    "s6_lambda1": {"value": 400.0, "rule": "stable", "note": "brute-force S6 on x^2+y^2=1"},
    "s6_lambda5": {"value": 5840.0, "rule": "stable", "note": "brute-force S6 on x^2+y^2=5"},
    "excess_r1": {"value": 1.32192809488736, "rule": "stable", "note": "e(R) = log(S6/N^3)/log N; N=4 S6=400"},
    "excess_r2": {"value": 1.32192809488736, "rule": "stable", "note": "N=4 S6=400"},
    "excess_r5": {"value": 1.17058421792246, "rule": "stable", "note": "N=8 S6=5840"},
    "excess_r25": {"value": 1.01193151216552, "rule": "stable", "note": "N=12 S6=21360"},
    "excess_r325": {"value": 0.842495336992796, "rule": "stable", "note": "N=24 S6=201120"},
    "excess_r1105": {"value": 0.77400550237315, "rule": "stable", "note": "N=32 S6=479120"},

    # 🧮 Bound constants (C = 2, C0 = 1/128, kappa = 1)
    "bound_constant_depth": {"value": 3.943572833, "rule": "stable",
                             "note": "C': max (chosen depth - best depth) / (L^theta log L), C=2, "
                                     "p in {4.5,5,5.5}, delta in 2^-32..2^-1024"},
    "bound_constant_circle": {"value": 2.008985005, "rule": "stable",
                              "note": "C'' with kappa=1: max circle_bound_log / (L^theta log L), C=2, C0=1/128"},
    "bound_constant_tau0": {"value": 1.145275521, "rule": "stable",
                            "note": "C''': max (1/2) log(1/tau_0) / L^(log_3 2), C0=1/128"},
}
