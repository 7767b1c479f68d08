import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "cemstokes.settings.test")
django.setup()
