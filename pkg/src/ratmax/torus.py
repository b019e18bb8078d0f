"""Discrete tori with exact rational frequency bins.

An axis of circumference ``Q`` sampled at ``L`` points carries the
frequencies ``k / Q`` for ``k in [-L/2, L/2)``. Coefficient arrays use numpy's
FFT ordering (bin ``k`` lives at index ``k mod L``).

Normalization: ``coeffs = fft2(samples)`` (unnormalized) and the inverse
carries ``1 / (L1 * L2)``. The discrete L2 norm weights every sample by the
cell area ``Q1 * Q2 / (L1 * L2)``, so that

    ||samples||^2 = Q1 * Q2 / (L1 * L2)**2 * sum |coeffs|^2.
"""

from __future__ import annotations

import csv
import io
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class TorusAxis:
    Q: int
    L: int

    def __post_init__(self):
        if self.Q < 1:
            raise ValueError("circumference Q must be a positive integer")
        if self.L < 2 or self.L % 2:
            raise ValueError("sample count L must be a positive even integer")

    @property
    def bins(self) -> np.ndarray:
        """Integer bin labels ``k`` in FFT order."""
        return np.fft.fftfreq(self.L, 1.0 / self.L).round().astype(np.int64)

    @property
    def freqs(self) -> np.ndarray:
        return self.bins / self.Q

    @property
    def spacing(self) -> float:
        return self.Q / self.L

    def index_of(self, k: int) -> int:
        if not -self.L // 2 <= k < self.L // 2:
            raise ValueError(f"bin {k} outside [-{self.L // 2}, {self.L // 2})")
        return k % self.L

    def coeff_norm2(self, coeffs: np.ndarray) -> float:
        return float(self.Q / self.L**2 * np.sum(np.abs(coeffs) ** 2))

    def sample_norm2(self, samples: np.ndarray) -> float:
        return float(self.spacing * np.sum(np.abs(samples) ** 2))


@dataclass(frozen=True)
class TorusGrid2:
    Q1: int
    Q2: int
    L1: int
    L2: int

    def __post_init__(self):
        self.axis(0), self.axis(1)

    def axis(self, r: int) -> TorusAxis:
        return TorusAxis(self.Q1, self.L1) if r == 0 else TorusAxis(self.Q2, self.L2)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.L1, self.L2)

    @property
    def cell_area(self) -> float:
        return self.Q1 * self.Q2 / (self.L1 * self.L2)

    def refined(self, m1: int, m2: int | None = None) -> "TorusGrid2":
        """Same frequency window, ``m`` times finer bins (circumference and samples scaled)."""
        m2 = m1 if m2 is None else m2
        return TorusGrid2(self.Q1 * m1, self.Q2 * m2, self.L1 * m1, self.L2 * m2)

    def sample_norm(self, samples: np.ndarray) -> float:
        return float(np.sqrt(self.cell_area * np.sum(np.abs(samples) ** 2)))

    def coeff_norm(self, coeffs: np.ndarray) -> float:
        return float(np.sqrt(self.cell_area / (self.L1 * self.L2) * np.sum(np.abs(coeffs) ** 2)))


@dataclass(frozen=True, eq=False)
class Spectrum2:
    grid: TorusGrid2
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != self.grid.shape:
            raise ValueError(f"coefficient shape {c.shape} does not match grid {self.grid.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_spatial(cls, grid: TorusGrid2, samples) -> "Spectrum2":
        return cls(grid, np.fft.fft2(np.asarray(samples, dtype=complex)))

    @classmethod
    def zeros(cls, grid: TorusGrid2) -> "Spectrum2":
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    @classmethod
    def single_bin(cls, grid: TorusGrid2, k1: int, k2: int, amplitude: complex = 1.0) -> "Spectrum2":
        c = np.zeros(grid.shape, dtype=complex)
        c[grid.axis(0).index_of(k1), grid.axis(1).index_of(k2)] = amplitude
        return cls(grid, c)

    def spatial(self) -> np.ndarray:
        return np.fft.ifft2(self.coeffs)

    def norm(self) -> float:
        return self.grid.coeff_norm(self.coeffs)

    def normalized(self) -> "Spectrum2":
        n = self.norm()
        return self if n == 0 else Spectrum2(self.grid, self.coeffs / n)

    # -- import / export -------------------------------------------------

    def rows(self):
        """Nonzero bins as ``(k1, k2, re, im)`` in increasing ``(k1, k2)`` order."""
        b1, b2 = self.grid.axis(0).bins, self.grid.axis(1).bins
        i1, i2 = np.nonzero(self.coeffs)
        order = np.lexsort((b2[i2], b1[i1]))
        for a, b in zip(i1[order], i2[order]):
            z = self.coeffs[a, b]
            yield int(b1[a]), int(b2[b]), float(z.real), float(z.imag)

    def to_csv(self, path) -> None:
        g = self.grid
        with open(path, "w", newline="") as fh:
            fh.write(f"# Q1={g.Q1} Q2={g.Q2} L1={g.L1} L2={g.L2}\n")
            w = csv.writer(fh)
            w.writerow(["k1", "k2", "re", "im"])
            for k1, k2, re, im in self.rows():
                w.writerow([k1, k2, repr(re), repr(im)])

    @classmethod
    def from_csv(cls, path) -> "Spectrum2":
        text = Path(path).read_text()
        head, _, body = text.partition("\n")
        if not head.startswith("#"):
            raise ValueError("spectrum CSV must start with a '# Q1=.. Q2=.. L1=.. L2=..' line")
        params = dict(tok.split("=") for tok in head[1:].split())
        grid = TorusGrid2(*(int(params[k]) for k in ("Q1", "Q2", "L1", "L2")))
        c = np.zeros(grid.shape, dtype=complex)
        reader = csv.DictReader(io.StringIO(body))
        ax1, ax2 = grid.axis(0), grid.axis(1)
        for row in reader:
            c[ax1.index_of(int(row["k1"])), ax2.index_of(int(row["k2"]))] = complex(
                float(row["re"]), float(row["im"]))
        return cls(grid, c)

    _MAGIC = b"RMXSPEC1"
    _ROW = np.dtype([("k1", "<i8"), ("k2", "<i8"), ("re", "<f8"), ("im", "<f8")])

    def to_binary(self, path) -> None:
        """Little-endian: magic, ``Q1 Q2 L1 L2 count`` as int64, then the rows."""
        rows = np.array(list(self.rows()), dtype=self._ROW)
        g = self.grid
        with open(path, "wb") as fh:
            fh.write(self._MAGIC)
            fh.write(struct.pack("<5q", g.Q1, g.Q2, g.L1, g.L2, rows.shape[0]))
            fh.write(rows.tobytes())

    @classmethod
    def from_binary(cls, path) -> "Spectrum2":
        data = Path(path).read_bytes()
        if data[:8] != cls._MAGIC:
            raise ValueError("not a spectrum file")
        q1, q2, l1, l2, count = struct.unpack_from("<5q", data, 8)
        grid = TorusGrid2(q1, q2, l1, l2)
        rows = np.frombuffer(data, dtype=cls._ROW, count=count, offset=48)
        c = np.zeros(grid.shape, dtype=complex)
        c[rows["k1"] % l1, rows["k2"] % l2] = rows["re"] + 1j * rows["im"]
        return cls(grid, c)
