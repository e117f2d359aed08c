from .local import *

SECRET_KEY = env('SECRET_KEY', default=SECRET_KEY)
DEBUG = False

# ----------------------------
# Logging
# ----------------------------
SOPRA_LOG_LEVEL = env('SOPRA_LOG_LEVEL', default='WARNING')

LOGGING["root"]["level"] = SOPRA_LOG_LEVEL

LOGGING["loggers"]["practices"] = {
    "handlers": ["console"],
    "level": SOPRA_LOG_LEVEL,
    "propagate": False,
}
