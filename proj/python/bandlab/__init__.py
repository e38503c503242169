try:
    from ._bandlab import *  # noqa: F401,F403  (installed layout)
except ImportError:
    from _bandlab import *  # noqa: F401,F403  (in-tree build)
