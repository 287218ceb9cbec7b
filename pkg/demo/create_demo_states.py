import os
import sys

import numpy as np

# Add the src directory to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

from robustkit.robustness import robustness_of
from robustkit.statefile import write_state
from robustkit.states import canonical_ket, maximally_mixed, random_pure

output_dir = os.path.join(os.path.dirname(__file__), 'states')

demo_states = {
    'bell': canonical_ket([1 / np.sqrt(2), 1 / np.sqrt(2)]),
    'product': canonical_ket([1.0, 0.0]),
    'skewed': canonical_ket([np.sqrt(0.8), np.sqrt(0.2)]),
    'qutrit_uniform': canonical_ket([1 / np.sqrt(3)] * 3),
    'random_seed7': random_pure(2, 7),
    'maximally_mixed': maximally_mixed(2),
}

for name, state in demo_states.items():
    path = write_state(os.path.join(output_dir, f'{name}.json'), state)
    if hasattr(state, 'amplitudes'):
        report = robustness_of(state)
        print(f"✅ {name}: R = {report.R_s:.6f}, O = {report.O_g:.6f} -> {path}")
    else:
        print(f"✅ {name}: mixed state -> {path}")

print(f"📊 Created {len(demo_states)} state files in {output_dir}")
print("💡 Try: robustkit robustness demo/states/bell.json")
print("💡 Try: robustkit verify demo/states/bell.json demo/states/maximally_mixed.json --a 0.3")
