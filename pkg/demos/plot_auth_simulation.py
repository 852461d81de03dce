"""
Owner versus impostor
=====================

Register two gait cycles of an owner, then judge fresh windows of the owner
and of someone walking faster with a larger swing.
"""

from behavior_auth import SynthSpec, auth_simulate

owner = SynthSpec(period=1.0, amplitude=1.0, noise_sigma=0.05, rng_seed=0, subject_id="owner")
impostor = SynthSpec(period=0.7, amplitude=1.4, noise_sigma=0.05, rng_seed=10_000,
                     subject_id="impostor")

result = auth_simulate(owner, impostor, n_windows=200)
print(f"false accept rate: {result.far:.3f}")
print(f"false reject rate: {result.frr:.3f}")

# Outside fractions: the owner sits near 1 - level, the impostor near 1.
owner_out = [v.outside_fraction for v in result.owner_verdicts]
imp_out = [v.outside_fraction for v in result.impostor_verdicts]
print(f"owner outside fraction:    mean {sum(owner_out) / len(owner_out):.2f}")
print(f"impostor outside fraction: mean {sum(imp_out) / len(imp_out):.2f}")

# Gate modes around the hand-over from owner to impostor.
for k in range(198, 203):
    print(f"after window {k}: {result.gate_trace[k].mode.value}")
