from hypothesis import settings

settings.register_profile("ca-verify", deadline=None, max_examples=60)
settings.load_profile("ca-verify")
