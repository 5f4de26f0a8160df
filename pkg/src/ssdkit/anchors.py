"""Traceability anchors attached to report rows.

Each key names a check; the value is the citation string written into the
``paper_ref`` field of the JSON report. Keeping them in one table lets the
numerical code refer to checks by what they test.
"""

from __future__ import annotations

ANCHORS: dict[str, str] = {
    # core
    "qpos": 'Definition 2.2, "b,c in A => q(b - c) >= 0"',
    "maximality": 'Definition 2.2, "not properly contained in any other q-positive set"',
    "min_q_zero_on_set": 'Eq (1), "inf q(A - a) = 0"',
    "cauchy_schwarz": 'Eq (26), "|<b,c>| <= ||b|| ||c||"',
    "p_nonneg": 'Eq (27), "1/2||.||^2 + q >= 0 on B"',
    "p_lipschitz": 'Eq (30)',
    # fitzpatrick
    "phi_two_route": 'Eq (3), "q(b) - inf q(A - b)"',
    "phi_eq_q_on_set": 'Eq (4), "Phi_A = q on A"',
    "psi_le_q_on_set": 'Lemma 3.2(a)',
    "sandwich_upper": 'Eq (44), "Psi_A >= f"',
    "sandwich_lower": 'Eq (16), "f >= Phi_A"',
    "phi_ge_q": 'Eq (5), "Phi_A >= q on B"',
    "phi_conj_le_q": 'Lemma 2.11(a), "Phi_A^@ <= q on A"',
    "phi_conj_ge": 'Lemma 2.11(b), "Phi_A^@ >= Phi_A v q on B"',
    "phi_biconj": 'Lemma 2.11(c), "Phi_A^@@ = Phi_A on B"',
    "phi_conj_routes": 'Eq (7), "f^@(c) := sup_B[<.,c> - f]"',
    "young_on_set": 'Lemma 2.12(a), "<b,a> <= q(a) + f(b)"',
    "psi_chain": 'Lemma 3.2(e)',
    # convex
    "biconjugate": 'Theorem 10.1 / Eq (67)',
    # vz-mas
    "vz_residual": 'Eq (32), "(f - q) inf-conv p = 0 on B"',
    "vz_density": 'Theorem 5.7, "f >= q on B and P_q(f) is p-dense in B"',
    "vz_routes": 'Theorem 5.7',
    "mas_primal": 'Definition 6.11, "f >= q on B"',
    "mas_dual": 'Definition 6.11, "f* >= q~ on B*"',
    "mas_vz_collapse": 'Theorem 6.12(a,b)',
    "duality": 'Lemma 6.10, "-((f - q) inf-conv p) = ((f* - q~) inf-conv p~) o iota"',
    "dist_5": 'Eq (35), "dist(d, P_q(f)) <= 5 sqrt((f - q)(d))"',
    "dist_36": 'Eq (36), "sqrt2 sqrt(-inf q(P_q(f) - c))"',
    "dist_48": 'Eq (48), "<= sqrt2 sqrt((f - q)(c))"',
    "sharpness": 'Remark 5.12, "the constant sqrt2 in the inequalities in (48) is sharp"',
    "pair_bound": 'Lemma 2.6',
    "pair_bound_linear": 'Remark 2.7',
    # gossez
    "dual_form": 'Eq (19), "[iota(b), iota(c)] = <b,c>"',
    "dual_q": 'Eq (20), "q~ o iota = q"',
    "dual_pairing": 'Eq (49), "[iota(b), c*] = <b, c*>"',
    "hat_identity": 'Lemma 6.2, "b^ = iota~ o iota(b)"',
    "theta_two_route": 'Lemma 4.3(b), "Theta_A(d) = Phi_iota(A)(d)"',
    "phi_dual_on_image": 'Eq (22)',
    "gossez_inclusion": 'Theorem 4.5(a), "iota(A) subset A^G"',
    "gossez_forms": 'Definition 4.4 / Eq (24)',
    "ni": 'Lemma 9.4(b), "Theta_A >= q~ on E* x E**"',
    "gossez_sets": 'Theorem 4.5(c), "A^G = P_q~(Theta_A)"',
    "gossez_chain": 'Lemma 4.3(c), "Theta_A^@ >= Phi_A^* >= Theta_A on D"',
    "extension_near_image": 'Theorem 9.5 (finite-dimensional shadow)',
}

SCENARIO_ANCHORS: dict[str, list[str]] = {
    "remark-5-12": ["Remark 5.12", "Eq (47)", "Eq (48)", "Eq (32)", "Eq (36)"],
    "helix": ["Example 2.3(c)", "Definition 2.2"],
    "line-1-neg1-2": ["Example 2.3(c)", "Definition 2.2"],
    "pairing-diagonal": ["Example 2.4", "Example 5.3", "Eq (44)", "Eq (32)", "Definition 6.11",
                         "Lemma 6.10", "Eq (35)", "Eq (36)", "Theorem 4.5", "Lemma 9.4(b)"],
    "hilbert-self-dual": ["Example 2.3(a)", "Remark 6.3", "Lemma 6.10"],
    "product-space": ["Remark 6.7"],
    "biconjugation-grid": ["Theorem 10.1", "Eq (67)"],
}


def ref(key: str) -> str:
    return ANCHORS[key]
