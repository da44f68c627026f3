"""A quartic in P(1,1,1,3): lifting the bundle changes what the engine can do.

With lifting 1 the I-function has the right shape and the mirror map is
trivial after the limit. With lifting 2 the engine refuses.
"""

from qperiod.giventaleng import AsymptoticShapeError, TwistSpec, quantum_period, regularize
from qperiod.stackyfan import ExtendedStackyFan, StackyFan

fan = StackyFan.from_git([[1, 1, 1, 3]])
ext = ExtendedStackyFan.from_rows(fan, [[0, 0, 0, 1]])

G = regularize(quantum_period(ext, TwistSpec.of([[4, 1]]), order=7, params=("x",)))
print("lifting 1:")
print("\n".join(G.lines()))

try:
    quantum_period(ext, TwistSpec.of([[4, 2]]), order=4)
except AsymptoticShapeError as exc:
    print("\nlifting 2:", exc)
