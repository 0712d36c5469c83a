import importlib.util
from pathlib import Path

import pytest

SCRIPT = Path(__file__).resolve().parent.parent / "scripts" / "reproduce.py"


@pytest.fixture(scope="module")
def reproduce():
    module_spec = importlib.util.spec_from_file_location("reproduce", SCRIPT)
    module = importlib.util.module_from_spec(module_spec)
    module_spec.loader.exec_module(module)
    return module


class TestParser:
    def test_progress_bar_off_by_default(self, reproduce):
        args = reproduce.build_parser().parse_args([])
        assert args.enable_pbar is False
        assert (args.seed, args.n_reps, args.n_workers) == (0, 50, 1)

    def test_progress_bar_flag(self, reproduce):
        assert reproduce.build_parser().parse_args(["--enable_pbar"]).enable_pbar is True

    def test_progress_bar_takes_no_value(self, reproduce):
        with pytest.raises(SystemExit):
            reproduce.build_parser().parse_args(["--enable_pbar", "False"])
