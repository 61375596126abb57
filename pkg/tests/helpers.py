from pathlib import Path

from tapsim.documents import load_script

DATA = Path(__file__).parent / "data"
NOISY = ("noisy-hdpi", "noisy-xhdpi", "noisy-xxhdpi")


def noisy(name):
    return load_script(DATA / f"{name}.json")
