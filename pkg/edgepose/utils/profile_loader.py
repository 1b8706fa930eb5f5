import copy
import os
import yaml
from typing import Dict, Any, Optional, List
from dataclasses import dataclass, field
from difflib import get_close_matches

CONFIG_SECTIONS = ('edge', 'extract', 'pose', 'scene', 'sweep', 'baseline', 'motion')
DEFAULT_CONFIG_FILE = 'default_config.yaml'
PACKAGED_CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'config')


@dataclass
class ObjectProfile:
    name: str
    key: str
    dims: List[float]
    description: str = ""
    overrides: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], key: str = "") -> 'ObjectProfile':
        dims = data.get('dims')
        if not dims or len(dims) != 3:
            raise ValueError(f"object profile '{key}' needs dims: [l, b, h]")
        return cls(
            name=data.get('name', key or 'Unknown'),
            key=key,
            dims=[float(d) for d in dims],
            description=data.get('description', ''),
            overrides={k: v for k, v in data.items() if k in CONFIG_SECTIONS},
        )


@dataclass
class ScenePreset:
    name: str
    key: str
    kind: str
    description: str = ""
    scene: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], key: str = "") -> 'ScenePreset':
        kind = data.get('kind', 'clutter')
        if kind not in ('clutter', 'plane'):
            raise ValueError(f"scene preset '{key}' has unknown kind '{kind}'")
        return cls(
            name=data.get('name', key or 'Unknown'),
            key=key,
            kind=kind,
            description=data.get('description', ''),
            scene=data.get('scene', {}) or {},
        )


def deep_merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively merge ``update`` into a copy of ``base``; lists and scalars are replaced."""
    merged = copy.deepcopy(base)
    for key, value in (update or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


class ProfileLoader:

    def __init__(self, config_dir: Optional[str] = None):
        self.config_dir = config_dir or PACKAGED_CONFIG_DIR
        self.object_dir = os.path.join(self.config_dir, 'objects')
        self.scene_dir = os.path.join(self.config_dir, 'scenes')

    def _normalize_input(self, value: str) -> str:
        # Square-Tile, square_tile, squaretile all become squaretile
        return value.strip().lower().replace('-', '').replace('_', '').replace(' ', '')

    def _find_closest_match(self, input_value: str, available_values: List[str]) -> Optional[str]:
        normalized_input = self._normalize_input(input_value)
        normalized_available = {self._normalize_input(v): v for v in available_values}

        if normalized_input in normalized_available:
            return normalized_available[normalized_input]

        matches = get_close_matches(normalized_input, normalized_available.keys(), n=1, cutoff=0.6)
        if matches:
            return normalized_available[matches[0]]

        return None

    def _get_suggestions(self, input_value: str, available_values: List[str], top_n: int = 3) -> List[str]:
        normalized_input = self._normalize_input(input_value)
        normalized_available = {self._normalize_input(v): v for v in available_values}

        matches = get_close_matches(normalized_input, normalized_available.keys(), n=top_n, cutoff=0.4)
        return [normalized_available[m] for m in matches]

    def resolve_object(self, name: str) -> Optional[str]:
        return self._find_closest_match(name, self.list_objects())

    def resolve_scene(self, name: str) -> Optional[str]:
        return self._find_closest_match(name, self.list_scenes())

    def _read_yaml(self, path: str) -> Dict[str, Any]:
        with open(path, 'r') as f:
            data = yaml.safe_load(f)
        return data or {}

    def load_object_profile(self, name: str) -> Optional[ObjectProfile]:
        available_objects = self.list_objects()
        matched = self._find_closest_match(name, available_objects)
        key = matched if matched else name.strip().lower()
        profile_path = os.path.join(self.object_dir, f"{key}.yaml")

        if not os.path.exists(profile_path):
            suggestions = self._get_suggestions(name, available_objects)
            print(f"\n[ERROR] Object '{name}' not found.")
            if suggestions:
                print(f"Did you mean: {', '.join(suggestions)}?")
            print(f"Available objects: {', '.join(available_objects)}")
            print("Use 'edgepose list-objects' to see all object profiles.\n")
            return None

        try:
            return ObjectProfile.from_dict(self._read_yaml(profile_path), key=key)
        except (yaml.YAMLError, ValueError) as e:
            print(f"[WARN] Could not load object profile '{name}': {e}")
            return None

    def load_scene_preset(self, name: str) -> Optional[ScenePreset]:
        available_scenes = self.list_scenes()
        matched = self._find_closest_match(name, available_scenes)
        key = matched if matched else name.strip().lower()
        preset_path = os.path.join(self.scene_dir, f"{key}.yaml")

        if not os.path.exists(preset_path):
            suggestions = self._get_suggestions(name, available_scenes)
            print(f"\n[ERROR] Scene preset '{name}' not found.")
            if suggestions:
                print(f"Did you mean: {', '.join(suggestions)}?")
            print(f"Available scene presets: {', '.join(available_scenes)}\n")
            return None

        try:
            return ScenePreset.from_dict(self._read_yaml(preset_path), key=key)
        except (yaml.YAMLError, ValueError) as e:
            print(f"[WARN] Could not load scene preset '{name}': {e}")
            return None

    def _list_yaml(self, directory: str) -> List[str]:
        if not os.path.exists(directory):
            return []

        profiles = []
        for filename in os.listdir(directory):
            if filename.endswith('.yaml'):
                profiles.append(filename.replace('.yaml', ''))
        return sorted(profiles)

    def list_objects(self) -> List[str]:
        return self._list_yaml(self.object_dir)

    def list_scenes(self) -> List[str]:
        return self._list_yaml(self.scene_dir)

    def get_combined_config(self,
                            object_name: Optional[str] = None,
                            scene: Optional[str] = None,
                            user_config_path: Optional[str] = None) -> Dict[str, Any]:
        """Defaults, then the object profile, then the scene preset, then the user YAML."""
        config = self._get_default_config()

        if object_name:
            profile = self.load_object_profile(object_name)
            if profile is None:
                raise ValueError(f"unknown object profile '{object_name}'")
            config = deep_merge(config, profile.overrides)
            config['dims'] = list(profile.dims)
            config['object_name'] = profile.key

        if scene:
            preset = self.load_scene_preset(scene)
            if preset is None:
                raise ValueError(f"unknown scene preset '{scene}'")
            config['scene'] = deep_merge(config['scene'], preset.scene)
            config['scene']['kind'] = preset.kind
            config['scene_name'] = preset.key

        if user_config_path:
            if not os.path.exists(user_config_path):
                raise FileNotFoundError(user_config_path)
            try:
                user = self._read_yaml(user_config_path)
            except yaml.YAMLError as e:
                raise ValueError(f"invalid config file {user_config_path}: {e}") from e
            if not isinstance(user, dict):
                raise ValueError(f"config file {user_config_path} must hold a mapping")
            config = deep_merge(config, user)

        return config

    def _get_default_config(self) -> Dict[str, Any]:
        """The packaged default_config.yaml, with the config dir's own copy merged over it."""
        config = self._read_yaml(os.path.join(PACKAGED_CONFIG_DIR, DEFAULT_CONFIG_FILE))
        local_path = os.path.join(self.config_dir, DEFAULT_CONFIG_FILE)
        if os.path.abspath(self.config_dir) != PACKAGED_CONFIG_DIR and os.path.exists(local_path):
            config = deep_merge(config, self._read_yaml(local_path))
        return config
