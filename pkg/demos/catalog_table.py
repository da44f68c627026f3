"""Runs every catalog family at order 4 and prints a compact summary.

The same table, with more columns, is ``qperiod table``.
"""

from qperiod.catalog import records, run_all, summary_counts

verdicts = run_all(4)
for rec, v in zip(records(), verdicts):
    print(f"{rec.index:>2}  {v.name:<14} {v.method:<20} {v.status}")
print(summary_counts(verdicts))
