import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "nonnewtonian_blowup.settings")
django.setup()
