from pathlib import Path
import environ
import os

env = environ.Env(
    DEBUG=(bool, False),
    SOPRA_HABIT_THRESHOLD=(float, 0.5),
    SOPRA_BELIEF_FILTER=(str, 'off'),
    SOPRA_CONFLICT_TOLERANCE=(float, 1e-9),
    SOPRA_LOG_LEVEL=(str, 'INFO'),
)

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent.parent

environ.Env.read_env(os.path.join(BASE_DIR, '.env'))

# No request handling happens here; the key only satisfies Django's startup.
SECRET_KEY = env('SECRET_KEY', default='django-insecure-sopra-local-only')

DEBUG = env('DEBUG')

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    # local apps
    'practices',
]

# Knowledge bases live in scenario files, not in a database
DATABASES = {}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# ----------------------------
# Decision & inference defaults
# ----------------------------
SOPRA_HABIT_THRESHOLD = env('SOPRA_HABIT_THRESHOLD')
SOPRA_BELIEF_FILTER = env('SOPRA_BELIEF_FILTER')
SOPRA_CONFLICT_TOLERANCE = env('SOPRA_CONFLICT_TOLERANCE')

# 1 forces ANSI colour, 0 disables it, unset lets Django decide per stream
SOPRA_COLOR = env.bool('SOPRA_COLOR', default=None)


# ----------------------------
# Logging
# ----------------------------
SOPRA_LOG_LEVEL = env('SOPRA_LOG_LEVEL')

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,

    "formatters": {
        "simple": {
            "format": "[{levelname}] {name}: {message}",
            "style": "{",
        },
        "verbose": {
            "format": "[{asctime}] {levelname} {name} {message}",
            "style": "{",
        },
    },

    # stdout carries command output only
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
            "formatter": "verbose",
        },
    },

    "root": {
        "handlers": ["console"],
        "level": SOPRA_LOG_LEVEL,
    },

    "loggers": {
        "django": {
            "handlers": ["console"],
            "level": "WARNING",
            "propagate": False,
        },
    },
}
