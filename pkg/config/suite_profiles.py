"""
Named profiles for the verification suite
A profile fixes the fields, sizes and seed of a run; CLI flags override single values.
"""

# Fast smoke run, used by the API default and the test suite
QUICK_PROFILE = {
    "profile_id": "quick",
    "name": "Quick",
    "description": "A handful of small instances over GF(2) and GF(3)",
    "fields": ["2", "3"],
    "max_dim": 4,
    "budget": 10,
    "k_max": 4,
    "seed": 7,
    "drop_hypotheses": False,
}

DEFAULT_PROFILE = {
    "profile_id": "default",
    "name": "Default",
    "description": "Catalogue plus 100 generated instances per field over GF(2), GF(3), GF(5)",
    "fields": ["2", "3", "5"],
    "max_dim": 6,
    "budget": 100,
    "k_max": 8,
    "seed": 7,
    "drop_hypotheses": False,
}

# Sizes behind the desk-scale acceptance runs
ACCEPTANCE_PROFILE = {
    "profile_id": "acceptance",
    "name": "Acceptance",
    "description": "Catalogue plus 300 generated instances per field, dimension at most 6",
    "fields": ["2", "3", "5"],
    "max_dim": 6,
    "budget": 300,
    "k_max": 8,
    "seed": 7,
    "drop_hypotheses": False,
}

# Report-only runs of the residual checks on non-subnormal subalgebras
EXPLORE_PROFILE = {
    "profile_id": "explore",
    "name": "Explore",
    "description": "Default sizes with the subnormality hypothesis dropped in report-only mode",
    "fields": ["2", "3"],
    "max_dim": 6,
    "budget": 100,
    "k_max": 8,
    "seed": 11,
    "drop_hypotheses": True,
}

REQUIRED_KEYS = ["fields", "max_dim", "budget", "k_max", "seed", "drop_hypotheses"]


class ProfileManager:
    """Lookup and validation of suite profiles"""

    def __init__(self):
        self.profiles = {
            "quick": QUICK_PROFILE,
            "default": DEFAULT_PROFILE,
            "acceptance": ACCEPTANCE_PROFILE,
            "explore": EXPLORE_PROFILE,
        }

    def get_profile(self, profile_id):
        """Get a copy of a profile by ID"""
        if profile_id not in self.profiles:
            raise KeyError(f"unknown suite profile {profile_id!r}; choose from {', '.join(self.profiles)}")
        profile = dict(self.profiles[profile_id])
        profile["fields"] = list(profile["fields"])
        return profile

    def list_profiles(self):
        return [
            {
                "id": profile_id,
                "name": profile["name"],
                "description": profile["description"],
            }
            for profile_id, profile in self.profiles.items()
        ]

    def add_custom_profile(self, profile_id, profile_config):
        for key in REQUIRED_KEYS:
            if key not in profile_config:
                raise ValueError(f"Profile missing required field: {key}")
        self.profiles[profile_id] = dict(profile_config, profile_id=profile_id)
        return True


_manager = ProfileManager()


def get_profile(profile_id="default"):
    return _manager.get_profile(profile_id)


def list_profiles():
    return _manager.list_profiles()
