import sys
import tempfile
import importlib
from pathlib import Path

COLLECTION_ROOT = Path(__file__).resolve().parents[2]


def _mount_collection():
    """
    ansible only imports collections from <path>/ansible_collections/<namespace>/<name>.
    a bare checkout is not laid out like that, so link it into a temporary tree
    """
    try:
        importlib.import_module("ansible_collections.unity.contexture.plugins.plugin_utils.ratbool")
        return
    except ImportError:
        pass
    mount = Path(tempfile.mkdtemp(prefix="contexture-"))
    link = mount / "ansible_collections" / "unity" / "contexture"
    link.parent.mkdir(parents=True)
    link.symlink_to(COLLECTION_ROOT, target_is_directory=True)
    sys.path.insert(0, str(mount))
    importlib.invalidate_caches()


_mount_collection()
