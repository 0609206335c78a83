"""Two compartments joined by a narrow neck.

Each direction of the dumbbell has a mean passage time built from the
funnel escape time, the neck transit and the neck entry flux. The
compartment occupation then switches like a telegraph process whose
relaxation rate is the sum of the two rates. A long jump simulation
recovers that rate from the decay of the autocovariance.
"""

from __future__ import annotations

from narrow_escape import asymptotics as asy
from narrow_escape.geometry import DumbbellSpec
from narrow_escape.markov import chain_generator, network_eigen, simulate_telegraph, two_state

spec = DumbbellSpec(omega1_vol=1.0, omega3_vol=3.0, Rc1=1.0, Rc3=2.0, a=0.01, L=1.0)
r = asy.dumbbell_rates(spec)
print(f"mean passage I -> II {r.tau_12:.1f}, II -> I {r.tau_21:.1f}")
print(f"relaxation rate {r.eigenvalue:.6e}")

sp = network_eigen(two_state(r.rate_12, r.rate_21))
print(f"generator spectrum {sp.eigenvalues}, stationary law {sp.stationary}")

fit = simulate_telegraph(r.rate_12, r.rate_21, horizon=2e4 / r.eigenvalue, seed=4)
print(f"simulated relaxation {fit.relaxation:.6e} from {fit.n_events} switches "
      f"(occupation of I {fit.occupation_a:.3f} +/- {fit.occupation_stderr:.3f})")

# A chain of compartments: the slowest mode is set by the weakest link.
chain = chain_generator([r.rate_12, r.rate_12 * 10], [r.rate_21, r.rate_21 * 10])
print(f"three compartments: relaxation rate {network_eigen(chain).relaxation_rate:.6e}")
