"""Blow-up of P(1,1,3) at its singular point: fan data, then the quantum period.

Run with ``python demos/toric_example.py``.
"""

from qperiod.giventaleng import quantum_period, regularize
from qperiod.stackyfan import StackyFan, extend

fan = StackyFan(
    [[1, -1], [0, 1], [-1, 2], [-2, 1]],
    [[0, 1], [1, 2], [2, 3], [3, 0]],
    weights=[[3, 0, 1, 1], [-1, 1, -1, 0]],
)
print("Box elements and ages:")
for b in fan.box:
    print(f"  {b.vector}  age {b.age}")
print("nef cone:", fan.nef.generators)
print("-K:", fan.anticanonical, "Fano" if fan.is_fano else "not Fano")

# extending by the twisted-sector vector (-1, 1) gives a parameter x
ext = extend(fan, [[-1, 1]])
G = regularize(quantum_period(ext, order=8))
print("\nregularized quantum period:")
print("\n".join(G.lines()))
