from .settings import *  # noqa

DEBUG = True

LOGGING["root"]["level"] = "WARNING"  # noqa

# Campaigns in the unit tests run on reduced families
NCELL_CAMPAIGN = {  # noqa
    **NCELL_CAMPAIGN,  # noqa
    "instances": 4,
    "n_list": (1, 2, 4),
    "grid_points": 60,
    "e_ceiling": 40.0,
}
