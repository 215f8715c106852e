try:
    from pfckit._pfckit import *  # noqa: F401,F403  (pip-installed layout)
except ImportError:
    from _pfckit import *  # noqa: F401,F403  (in-tree build on PYTHONPATH)
