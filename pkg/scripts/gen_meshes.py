"""Regenerate the bundled unit-square meshes in ``src/thnus/data``.

    python3 scripts/gen_meshes.py
"""

from pathlib import Path

from thnus.meshes import BUILTIN, generate_builtin

OUT = Path(__file__).resolve().parents[1] / "src" / "thnus" / "data"

if __name__ == "__main__":
    for name in BUILTIN:
        _, text = generate_builtin(name)
        (OUT / f"{name}.mesh").write_text(text, encoding="utf-8")
        print(f"{name}: {len(text.splitlines())} lines")
