import json
import os
import subprocess
from pathlib import Path

import pytest

BIN = os.environ.get("TSPH_BIN", str(Path(__file__).resolve().parents[2] / "build" / "tsph"))
DATA = Path(os.environ.get("TSPH_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


class Runner:
    def __call__(self, *args, stdin=None, check=True):
        proc = subprocess.run([BIN, *map(str, args)], input=stdin, capture_output=True, text=True)
        if check and proc.returncode != 0:
            raise AssertionError(f"exit {proc.returncode}: {proc.stderr}")
        return proc

    def json(self, *args, stdin=None):
        return json.loads(self(*args, stdin=stdin).stdout)


@pytest.fixture
def tsph():
    return Runner()


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def two_windings(tmp_path):
    path = tmp_path / "series.csv"
    path.write_text("time,value\n0,0\n1,2.5\n2,0.5\n3,2.7\n4,0.8\n5,3\n")
    return path
