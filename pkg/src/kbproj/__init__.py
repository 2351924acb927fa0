"""kbproj: exact homological algebra for bounded complexes of projectives.

Core layers:

* ``linalg``   exact scalars and matrices (QQ, GF(p), Laurent rings)
* ``algebra``  finite-dimensional algebra presentations, modules, ideals
* ``homcat``   bounded complexes of projective summands, cones, triangles
* ``functors`` bimodule-induced functors between homotopy categories
* ``derived``  minimal resolutions, Tor, homological-epimorphism checks
* ``lifting``  certificate search for lifting maps and complexes
* ``ideals``   ideals of maps on finite subcategories, telescope reports
* ``almost``   idempotent-ideal quotients and contraction verification
* ``fixture``/``runner``/``reports``/``cli``  batch task interface
"""

__version__ = "0.1.0"
