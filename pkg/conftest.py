"""Root collection config: only collect viz tests when fmp-viz is installed."""

import importlib.util

collect_ignore = []
if importlib.util.find_spec("fmp_viz") is None:
    collect_ignore.append("viz")
