import re
import sys
from importlib.resources import files
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

CORPUS = files("polybound").joinpath("corpus")


def corpus_text(name: str) -> str:
    return CORPUS.joinpath(f"{name}.asm").read_text()


def corpus_names():
    return sorted(p.name[:-4] for p in CORPUS.iterdir() if p.name.endswith(".asm"))


def corpus_inputs(text: str):
    """Input valuations from a ``# inputs: r1=0; r1=5`` header, else [{}]."""
    mo = re.search(r"#\s*inputs:\s*(.*)", text)
    if not mo:
        return [{}]
    out = []
    for case in mo.group(1).split(";"):
        regs = {}
        for item in case.split(","):
            if item.strip():
                r, v = item.split("=")
                regs[r.strip()] = int(v)
        out.append(regs)
    return out


@pytest.fixture
def gen():
    from polybound.state import VarGen
    return VarGen()


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
