"""Writes the checked-in .lvt fixtures.

The encoder here is written against the byte layout directly (struct, little-
endian) so the C++ reader and writer are checked against an independent
producer. Re-running this script must reproduce the committed files exactly.
"""
import json
import os
import struct

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))


def encode(values, dims, meta, dtype=0):
    meta_bytes = json.dumps(meta, sort_keys=True, separators=(",", ":")).encode()
    out = b"LVT1" + struct.pack("<II", 1, len(dims))
    out += b"".join(struct.pack("<Q", d) for d in dims)
    out += struct.pack("<II", dtype, len(meta_bytes)) + meta_bytes
    fmt = "<d" if dtype == 0 else "<f"
    out += b"".join(struct.pack(fmt, float(v)) for v in np.asarray(values).ravel())
    return out


def write(name, values, dims, meta, dtype=0):
    with open(os.path.join(HERE, name), "wb") as f:
        f.write(encode(values, dims, meta, dtype))


def meta(role, layer=0, model="fixture", prompt_set="fixture"):
    return {"layer": layer, "model": model, "prompt_set": prompt_set, "role": role}


def lowpass(v, k):
    d = len(v)
    i = np.arange(d)
    mask = (2 * i < k) | (2 * i > 2 * d - k)
    return np.real(np.fft.ifft(np.fft.fft(v) * mask))


def main():
    rng = np.random.default_rng(20240611)

    values = np.arange(1, 7, dtype=float)
    write("golden_2x3.lvt", values, [2, 3], meta("positive", 3, "golden"))
    write("golden_2x3_f32.lvt", values, [2, 3], meta("positive", 3, "golden"), dtype=1)

    # Identity path: pos = neg + w, w free of Nyquist energy.
    d = 16
    t = np.arange(d)
    w = 0.75 + np.cos(2 * np.pi * t / d) - 0.5 * np.sin(2 * np.pi * 3 * t / d)
    neg = rng.normal(size=(5, d))
    pos = neg + w
    write("ident_pos.lvt", pos, [5, d], meta("positive", 2))
    write("ident_neg.lvt", neg, [5, d], meta("negative", 2))
    write("ident_w.lvt", w, [d], meta("pattern", 2))

    # Degenerate: pos - neg = {w, -w}.
    write("degen_pos.lvt", np.stack([w, -w]), [2, d], meta("positive", 2))
    write("degen_neg.lvt", np.zeros((2, d)), [2, d], meta("negative", 2))

    cross = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    write("cross4.lvt", cross, [4, 2], meta("direction", 1))
    write("identical.lvt", np.tile([1.0, 2.0, 3.0, 4.0], (3, 1)), [3, 4], meta("direction", 1))
    write("dirs_20x8.lvt", rng.normal(size=(20, 8)) * np.linspace(3, 0.5, 8), [20, 8], meta("direction", 4))

    b = rng.normal(size=32)
    write("bands_b.lvt", b, [32], meta("pattern", 0, "reference"))
    write("bands_a.lvt", lowpass(b, 8), [32], meta("pattern", 0, "lowpass"))
    write("bands_short.lvt", b[:16], [16], meta("pattern", 0, "short"))

    write("hidden_3x48.lvt", rng.normal(size=(3, 48)), [3, 48], meta("positive", 1, "toy-target"))

    pairs = []
    for i in range(12):
        body = [int(x) for x in rng.integers(0, 28, size=5)]
        pairs.append({"id": f"q{i}", "positive": body + [28, 29, 30], "negative": body + [31]})
    with open(os.path.join(HERE, "toy_prompts.json"), "w") as f:
        json.dump({"prompt_set": "toy-cot", "pairs": pairs}, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
