"""Drive the full data pipeline through the command-line interface.

Builds a dataset in a temporary directory: phantom -> simulated case ->
extracted 2D samples -> stand-in predictions -> scores. The "oracle"
predictions are the true artifact images, so the corrected columns collapse
to (numerically) perfect scores; "zero" predictions leave the sparse images
untouched. A trained model lands between the two.
"""

import tempfile
from pathlib import Path

from sparsect.cli import main

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    data = tmp / "data"

    main(["phantom", "--out", str(tmp / "phantom.spct"),
          "--shape", "64,64,4", "--seed", "1"])

    main(["simulate", "--volume", str(tmp / "phantom.spct"),
          "--geometry", "parallel", "--views", "32,64", "--full-views", "256",
          "--out", str(data), "--case-id", "demo", "--subject", "subj0"])

    main(["extract", "--out", str(data), "--mode", "2d"])

    print("\n--- zero predictions (no correction) ---")
    main(["make-predictions", "--out", str(data),
          "--predictions", str(tmp / "zero"), "--kind", "zero"])
    main(["score", "--out", str(data), "--predictions", str(tmp / "zero")])

    print("\n--- oracle predictions (perfect correction) ---")
    main(["make-predictions", "--out", str(data),
          "--predictions", str(tmp / "oracle"), "--kind", "oracle"])
    main(["score", "--out", str(data), "--predictions", str(tmp / "oracle"),
          "--export-images", str(tmp / "images")])

    exported = sorted(p.name for p in (tmp / "images").rglob("*.pgm"))
    print("\nexported image panels:", ", ".join(exported))
