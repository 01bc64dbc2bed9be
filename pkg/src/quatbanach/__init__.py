"""p-adic quaternion units, their Lie algebra, and the weight modules attached to them.

Modules:
    padic          p-adic scalars with tracked precision, and Q_p(sqrt p)
    quaternion     the quaternion division algebra over Q_p and its principal units
    lie            the Lie algebra g_D, exp/log, coordinates of the second kind
    enveloping     PBW normal forms in the enveloping algebra
    weight         the weight modules W_{lambda,chi} and their valuation profiles
    decomposition  cosets of T*G^{p^n} and projections of finite distributions
    iwasawa        b-coordinate expansions and the norms ||.||_r
    config, cli, suite   run configuration, command line, acceptance checks
"""

__version__ = "0.1.0"
