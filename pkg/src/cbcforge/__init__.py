"""cbcforge: build programs alongside their correctness arguments.

Two construction styles share one proof kernel:

  * guarded-command programs grown by checked refinement steps, including
    named blocks that can be introduced now and implemented later;
  * object-oriented programs assembled from specification-carrying traits,
    where composition itself discharges the compatibility obligations.

Obligations are decided by a bounded-domain enumeration prover and can be
exported as SMT-LIB2 scripts for an external solver.
"""

__version__ = "0.1.0"
