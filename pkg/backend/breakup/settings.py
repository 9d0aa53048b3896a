import os
from math import pi
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv('SECRET_KEY', 'django-insecure-breakup-lab-local-key')

DEBUG = os.getenv('DEBUG', 'True') == 'True'

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'rest_framework',
    'spectral',
    'equations',
    'stepping',
    'hopf',
    'pi2',
    'asymptotics',
    'hamiltonian',
    'diagnostics',
    'experiments',
]

# Dummy database for Django (required but not used)
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': ':memory:',
    }
}

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Worker pool for epsilon sweeps and catalog batches
BREAKUP_WORKERS = int(os.getenv('BREAKUP_WORKERS', '1'))

BREAKUP_OUTPUT_DIR = Path(os.getenv('BREAKUP_OUTPUT_DIR', BASE_DIR / 'runs'))

BREAKUP_LOG_LEVEL = os.getenv('BREAKUP_LOG_LEVEL', 'INFO')

# Numerical defaults used by the experiment layer
LAB = {
    'HALF_WIDTH': 8 * pi,
    'GRID_SIZE': 2 ** 12,
    'U_RANGE': (0.05, 1.05),
    'EPS_SWEEP': [10 ** (-1 - 0.25 * j) for j in range(7)],
    'QUASITRIV_SWEEP': [10 ** (-1 - 0.125 * j) for j in range(9)],
    'ENERGY_TOLERANCE': 1e-6,
    'MASS_TOLERANCE': 1e-10,
    'RESOLUTION_WARNING': 1e-8,
    'RESOLUTION_ERROR': 1e-4,
    'BLOWUP_LINF': 1e6,
    'BLOWUP_TAIL': 1e-2,
    'PI2_X_MAX': 400.0,
    'PI2_NODES': 4096,
    'PI2_TOL': 1e-7,
    'PI2_T_GRID': [round(-2 + 0.05 * j, 2) for j in range(81)],
    'PI2_INTERPOLATION_TOL': 1e-6,
    'DT': 1e-4,
    'DEALIAS': os.getenv('BREAKUP_DEALIAS', 'False') == 'True',
    'DATA': 'sech2',
    'WINDOW_X': 3.0,
    'WINDOW_T': 2.0,
    'BRACKET_PAIRS': 3,
}

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {name} {message}',
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
        name: {
            'handlers': ['console'],
            'level': BREAKUP_LOG_LEVEL,
            'propagate': False,
        }
        for name in (
            'breakup', 'spectral', 'equations', 'stepping', 'hopf', 'pi2',
            'asymptotics', 'hamiltonian', 'diagnostics', 'experiments',
        )
    },
}
