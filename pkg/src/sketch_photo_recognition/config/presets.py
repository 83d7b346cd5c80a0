# Named configuration presets. Each preset is a partial config tree that is
# deep-merged over the model defaults (the full benchmark scale).

PRESETS = {
    "full": {
        "name": "Full scale",
        "description": "256-px crops from 272-px alignment, d=512, 3000/50/3000 epochs, five partitions of 48/75 identities",
        "config": {},
    },
    "toy": {
        "name": "Toy desk scale",
        "description": "64-px procedural dataset, d=128, 50/20/100 epochs, three partitions of 20/12 identities",
        "config": {
            "data": {"image_size": 64, "initial_size": 68},
            "model": {
                "latent_dim": 128,
                "encoder_base_channels": 16,
                "encoder_stages": 5,
                "generator_base_channels": 128,
                "generator_min_channels": 16,
                "disc_base_channels": 32,
            },
            "train": {
                "step1": {"epochs": 50},
                "step2": {"epochs": 20},
                "step3": {"epochs": 100},
            },
            "eval": {"partitions": 3, "train_count": 20, "test_count": 12},
        },
    },
    "tiny": {
        "name": "Tiny smoke scale",
        "description": "32-px images and one-epoch steps for unit tests",
        "config": {
            "data": {"image_size": 32, "initial_size": 34},
            "model": {
                "latent_dim": 16,
                "encoder_base_channels": 4,
                "encoder_stages": 3,
                "generator_base_channels": 16,
                "generator_min_channels": 4,
                "disc_base_channels": 8,
            },
            "train": {
                "step1": {"epochs": 1, "batch_size": 4},
                "step2": {"epochs": 1, "batch_size": 4},
                "step3": {"epochs": 1, "batch_size": 4},
            },
            "eval": {"partitions": 2, "train_count": 4, "test_count": 2, "ranks": [1, 2]},
        },
    },
}


def get_preset_names():
    return list(PRESETS)


def get_preset_config(preset_name: str):
    return PRESETS.get(preset_name, {}).get("config")


def get_preset_description(preset_name: str):
    return PRESETS.get(preset_name, {}).get("description", "")
