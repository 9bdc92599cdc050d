import os

from .settings import *  # noqa

LOGGING["handlers"]["console"]["formatter"] = "struct_json"  # noqa

LOKI_URL = os.environ.get("NCELL_LOKI_URL")
if LOKI_URL:
    LOGGING["handlers"]["loki"] = loki_handler(LOKI_URL)  # noqa
    LOGGING["root"]["handlers"].append("loki")  # noqa

NCELL_CAMPAIGN = {  # noqa
    **NCELL_CAMPAIGN,  # noqa
    "workers": int(os.environ.get("NCELL_WORKERS", "4")),
}
