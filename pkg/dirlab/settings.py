"""
Django settings for the dirlab project.

dirlab is a numerical laboratory for maximal directional singular integrals.
It has no web surface: everything runs through management commands
(see core_service.management.base.LabCommand).
"""

import os
import sys
from pathlib import Path

import psutil
from dotenv import load_dotenv

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Only used for signing, which the lab never does.
SECRET_KEY = 'dirlab-local-only'

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
	'django.contrib.auth',
	'django.contrib.contenttypes',

	'rest_framework',
	'django_q',

	'core_service',
	'spectral_service',
	'direction_service',
	'operator_service',
	'bmo_service',
	'tiles_service',
	'norm_service',
]

Q_CLUSTER = {
	'name': 'dirlab_workers',
	'orm': 'default',
	'timeout': 3600,  # growth scans on 512² grids can run for a while
	'retry': 3660,   # must be larger than timeout
	'ack_failures': True,
	'max_attempts': 1,
	'save_limit': 250,
	'catch_up': False,
	'log_level': 'INFO',
}

REST_FRAMEWORK = {
	'DEFAULT_RENDERER_CLASSES': [
		'rest_framework.renderers.JSONRenderer',
	],
	'UNAUTHENTICATED_USER': None,
}

RUNNING_TESTS = any(arg in sys.argv for arg in ["test", "pytest"])

# Logging Configuration
LOGGING = {
	'version': 1,
	'disable_existing_loggers': False,
	'formatters': {
		'verbose': {
			'format': '%(levelname)s %(asctime)s %(name)s %(message)s'
		},
	},
	'handlers': {
		'console': {
			'class': 'logging.StreamHandler',
			'formatter': 'verbose',
			'level': 'DEBUG',
		},
	},
	'loggers': {
		app: {
			'handlers': ['console'],
			'level': 'WARNING' if RUNNING_TESTS else 'INFO',
			'propagate': False,
		}
		for app in (
			'core_service', 'spectral_service', 'direction_service', 'operator_service',
			'bmo_service', 'tiles_service', 'norm_service',
		)
	},
}

DATABASES = {
	'default': {
		'ENGINE': 'django.db.backends.sqlite3',
		'NAME': BASE_DIR / 'dirlab.sqlite3',
	},
}

# Lab configuration

# Default output directory of every subcommand; the only environment override.
DIRLAB_OUTPUT_DIR = os.getenv('DIRLAB_OUTPUT_DIR', str(BASE_DIR / 'runs'))

# Size functionals are enumerated exactly up to this many entries/tiles.
DIRLAB_EXHAUSTIVE_LIMIT = 12

# The greedy σ-schedule stops once σ < DIRLAB_SIGMA_FLOOR · σ₀.
DIRLAB_SIGMA_FLOOR = 2 ** -20

DIRLAB_TILE_LIMIT = 2 ** 20

DIRLAB_POWER_ITERATIONS = 50
DIRLAB_POWER_TOLERANCE = 1e-10

DIRLAB_DEFAULT_THREADS = psutil.cpu_count() or 1


LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
