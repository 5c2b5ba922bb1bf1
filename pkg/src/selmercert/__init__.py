"""selmercert: exact certificates for rank-zero Selmer-vanishing hypotheses
over ring class fields of imaginary quadratic fields.

The pipeline verifies, by exact integer computation, every finitely
checkable hypothesis attached to a tuple (elliptic curve E, imaginary
quadratic field K, conductor c, ring class character chi, prime p),
evaluates the quaternionic algebraic special value attached to (E, K, chi),
and emits a machine-checkable JSON certificate of the conditional
conclusions when everything verifies.
"""

__version__ = "0.1.0"
