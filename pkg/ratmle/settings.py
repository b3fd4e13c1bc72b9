"""
Django settings for ratmle project.

Generated by 'django-admin startproject' using Django 3.2, trimmed to what a
command-line project needs: no URLs, templates or middleware.

For more information on this file, see
https://docs.djangoproject.com/en/3.2/topics/settings/
"""

from pathlib import Path
import os
# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent
LOG_DIR = os.environ.get('RATMLE_LOG_DIR', os.path.join(BASE_DIR, 'logs'))
os.makedirs(LOG_DIR, exist_ok=True)


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('RATMLE_SECRET_KEY', 'django-insecure-ratmle-local-only')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.environ.get('RATMLE_DEBUG', '1') == '1'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'hornmle',
    'django.contrib.contenttypes',
    'rest_framework',
]


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '[%(asctime)s] %(levelname)s [%(threadName)s] %(message)s',
            'datefmt': '%Y-%m-%d %H:%M:%S',
        },
        'indented': {  # additional space in first ('  ')
            'format': '  [%(asctime)s] %(levelname)s [%(processName)s] %(message)s',
            'datefmt': '%Y-%m-%d %H:%M:%S',
        },
        'card_separation': {
            'format': '%(message)s',
        },
        'simple': {
            'format': '%(levelname)s %(message)s',
        },
    },
    'handlers': {
        # Handler for Django/system logs
        'django_file': {
            'level': 'INFO',
            'class': 'logging.FileHandler',
            'filename': os.path.join(LOG_DIR, 'django.log'),
            'formatter': 'verbose',
            'encoding': 'utf-8',
        },
        'hornmle_file': {
            'level': 'DEBUG',
            'class': 'logging.FileHandler',
            'filename': os.path.join(LOG_DIR, 'hornmle.log'),
            'formatter': 'verbose',
            'encoding': 'utf-8',
        },
        'scan_file': {
            'level': 'DEBUG',
            'class': 'logging.FileHandler',
            'filename': os.path.join(LOG_DIR, 'scan.log'),
            'formatter': 'indented',
            'encoding': 'utf-8',
        },
        'scan_file_separation': {
            'level': 'DEBUG',
            'class': 'logging.FileHandler',
            'filename': os.path.join(LOG_DIR, 'scan.log'),
            'formatter': 'card_separation',
            'encoding': 'utf-8',
        },
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
            'level': 'WARNING',
        },
        'console_scan': {
            'class': 'logging.StreamHandler',
            'formatter': 'indented',
            'level': 'WARNING',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['django_file', 'console'],
            'level': 'INFO',
            'propagate': False,
        },
        # library and command events: logging.getLogger('hornmle')
        'hornmle': {
            'handlers': ['hornmle_file', 'console'],
            'level': 'DEBUG',
            'propagate': False,
        },
        'scan': {     # one line per family instance (shows with additional '  ' space)
            'handlers': ['scan_file', 'console_scan'],
            'level': 'DEBUG',
            'propagate': False,
        },
        'scan_separation': {   # separation between families (like "-----") without any prestring
            'handlers': ['scan_file_separation'],
            'level': 'DEBUG',
            'propagate': False,
        },
    },
}


# Database
# https://docs.djangoproject.com/en/3.2/ref/settings/#databases
# only used for scan checkpoints (--resume)

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.environ.get('RATMLE_DB', os.path.join(BASE_DIR, 'db.sqlite3')),
    }
}


# Internationalization
# https://docs.djangoproject.com/en/3.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

# Default primary key field type
# https://docs.djangoproject.com/en/3.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# after change restart manually!
RATMLE = {
    'SEED': 0,                       # default seed of every verification report
    'JOBS': 1,                       # worker processes for scans
    'FORMAT': 'json',                # json | table
    'DECIMAL_DIGITS': 10,            # significant digits printed next to exact fractions
    'EXPANSION_DEGREE_LIMIT': 12,    # friendliness: expand up to this degree, grid above
    'COFACTOR_MAX_SIZE': 8,          # largest matrix for the cofactor oracle
    'MAX_BIJECTION_COLUMNS': 16,
    'SEARCH_BUDGET': 200000,         # nodes visited by the column-bijection search
    'DEBUG_FRIENDLINESS': DEBUG,     # re-check friendliness of every passing scan term
    'FAMILY_BOUNDS': {'univariate': 17, 'trinomial': 17,
                      'linear_multiple': {'binomial': 8, 'trinomial': 3}},
}
FAMILIES = {'univariate': 'UnivariateFamily', 'trinomial': 'TrinomialFamily',
            'linear-multiples': 'LinearMultipleFamily'}
