"""
Django settings for the nonnewtonian_blowup project.

The project is used as a command-line toolkit only: there are no URLs,
templates, sessions or database tables. Django supplies the settings layer,
logging configuration, management commands and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

import os

# Build paths inside the project like this: os.path.join(BASE_DIR, ...)
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# Only used to satisfy Django's startup checks; nothing is signed.
SECRET_KEY = os.environ.get('BLOWUP_SECRET_KEY', 'nonnewtonian-blowup-offline-toolkit')

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'apps.blowup',
]

MIDDLEWARE = []

# No database: every command works on files.
DATABASES = {}

USE_TZ = True

TIME_ZONE = 'UTC'


# Logging
# https://docs.djangoproject.com/en/4.2/topics/logging/

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'apps.blowup': {
            'handlers': ['console'],
            'level': os.environ.get('BLOWUP_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}


# Toolkit overrides
# Built-in values live in `apps.blowup.conf.DEFAULTS`; entries here replace
# them, and TOLERANCES is merged key by key. A run config's `tolerances`
# object still wins over both.

BLOWUP = {
    'TOLERANCES': {},
}
