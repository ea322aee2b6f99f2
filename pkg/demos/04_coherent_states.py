"""Coherent states: eigenvalue from the vanishing discriminant, the three
shapes of S, the branch states and the s-independent reduced state."""
from qcs.cs_builder import build_states, reduced_state_audit
from qcs.operator_algebra import CSParameters

c = build_states(CSParameters(0.1, -2.0, 1.0))
a = c.audit
print("lambda_s           :", c.spectral.lambda_s)
print("discriminant        derived %.1e   printed %.1e" % (a["discriminant_residual"],
                                                           a["discriminant_residual_printed"]))
for k, v in a["S_agreement"].items():
    print(f"S agreement {k:30s} {v:.2e}")
print("gamma minus        :", a["gamma"]["minus"])
print("eigen residual rel :", {k: f"{v['rel']:.3g}" for k, v in a["eigen_residual_grid"].items()})
print("Riccati residual   :", {k: f"{v['coefficient']:.3g}" for k, v in a["riccati_residual"].items()})
print("reduced state audit:", reduced_state_audit(1.0))
