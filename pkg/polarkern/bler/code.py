from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from polarkern.exceptions import Gf2Error
from polarkern.models.binmatrix import BinMatrix
from polarkern.rmld.decoder import RmldDecoder, build_decoder, decode_phase_batch


@dataclass(frozen=True, eq=False)
class PolarCode:
    """
    Polar code of length n = l^m built on K^{(x)m}; u_i = 0 at every frozen index.
    """

    kernel: BinMatrix
    m: int
    frozen: np.ndarray
    decoder: RmldDecoder

    @classmethod
    def from_kernel(
        cls,
        kernel: BinMatrix,
        m: int,
        frozen: Optional[Sequence[bool]] = None,
        reuse: bool = True,
    ) -> "PolarCode":
        assert m >= 1, "`m` must be a positive integer"
        n = kernel.n_rows**m
        mask = np.zeros(n, dtype=bool) if frozen is None else np.asarray(frozen, dtype=bool)
        if mask.shape != (n,):
            raise Gf2Error(f"Frozen mask must have {n} entries, got {mask.shape}")
        return cls(kernel, m, mask, build_decoder(kernel, reuse=reuse))

    @property
    def ell(self) -> int:
        return self.kernel.n_rows

    @property
    def n(self) -> int:
        return self.ell**self.m

    @property
    def k(self) -> int:
        return int(np.count_nonzero(~self.frozen))

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def info_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.frozen)

    def with_frozen(self, frozen: Sequence[bool]) -> "PolarCode":
        mask = np.asarray(frozen, dtype=bool)
        if mask.shape != (self.n,):
            raise Gf2Error(f"Frozen mask must have {self.n} entries, got {mask.shape}")
        return PolarCode(self.kernel, self.m, mask, self.decoder)


def polar_transform(kernel: np.ndarray, u: np.ndarray) -> np.ndarray:
    """
    u K^{(x)m} for a batch u of shape (B, n): the l sub-blocks of u are transformed
    recursively and combined through the kernel.
    """

    size, n = u.shape
    ell = kernel.shape[0]
    if n == 1:
        return u
    sub = n // ell
    blocks = np.stack([polar_transform(kernel, u[:, r * sub:(r + 1) * sub]) for r in range(ell)], axis=1)
    return (np.einsum("rj,brt->bjt", kernel, blocks) % 2).reshape(size, n)


def encode(code: PolarCode, info: np.ndarray) -> np.ndarray:
    """
    Scatters `info` (k bits, or a (B, k) batch) into the unfrozen positions and
    returns the codeword(s).
    """

    info = np.asarray(info, dtype=np.int64)
    single = info.ndim == 1
    info = np.atleast_2d(info)
    if info.shape[1] != code.k:
        raise Gf2Error(f"Expected {code.k} information bits, got {info.shape[1]}")
    u = np.zeros((info.shape[0], code.n), dtype=np.int64)
    u[:, code.info_indices] = info
    codewords = polar_transform(code.kernel.to_numpy().astype(np.int64), u)
    return codewords[0] if single else codewords


def _successive_cancellation(
    code: PolarCode,
    llrs: np.ndarray,
    frozen: np.ndarray,
    truth: Optional[np.ndarray],
    errors: Optional[np.ndarray],
    offset: int,
) -> tuple[np.ndarray, np.ndarray]:
    size, n = llrs.shape
    if n == 1:
        hard = (llrs[:, 0] <= 0).astype(np.int64)
        if truth is None:
            decided = np.zeros(size, dtype=np.int64) if frozen[0] else hard
        else:
            assert errors is not None
            errors[:, offset] = hard != truth[:, 0]
            decided = truth[:, 0]
        return decided[:, None], decided[:, None]

    ell = code.ell
    sub = n // ell
    # column s of the (l, sub) view holds one kernel codeword
    tuples = llrs.reshape(size, ell, sub).transpose(0, 2, 1).reshape(size * sub, ell)
    u_blocks = []
    x_blocks = np.zeros((size, ell, sub), dtype=np.int64)
    for phase in range(ell):
        priors = x_blocks[:, :phase, :].transpose(0, 2, 1).reshape(size * sub, phase)
        soft = decode_phase_batch(code.decoder, phase, tuples, priors).reshape(size, sub)
        window = slice(phase * sub, (phase + 1) * sub)
        u_block, x_block = _successive_cancellation(
            code,
            soft,
            frozen[window],
            truth[:, window] if truth is not None else None,
            errors,
            offset + phase * sub,
        )
        u_blocks.append(u_block)
        x_blocks[:, phase, :] = x_block

    kernel = code.decoder.kernel_array.astype(np.int64)
    codeword = (np.einsum("rj,brt->bjt", kernel, x_blocks) % 2).reshape(size, n)
    return np.concatenate(u_blocks, axis=1), codeword


def _as_batch(code: PolarCode, llrs: np.ndarray) -> tuple[np.ndarray, bool]:
    llrs = np.asarray(llrs, dtype=float)
    single = llrs.ndim == 1
    llrs = np.atleast_2d(llrs)
    if llrs.shape[1] != code.n:
        raise Gf2Error(f"Expected {code.n} LLRs, got {llrs.shape[1]}")
    return llrs, single


def sc_decode(code: PolarCode, llrs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Multi-level successive cancellation; every length-l block is decoded phase by phase
    with the RMLD trees of the kernel.

    Returns the information bit estimate and the re-encoded codeword, for a single
    LLR vector or a (B, n) batch.
    """

    llrs, single = _as_batch(code, llrs)
    u, codeword = _successive_cancellation(code, llrs, code.frozen, None, None, 0)
    info = u[:, code.info_indices]
    return (info[0], codeword[0]) if single else (info, codeword)


def sc_decode_genie(code: PolarCode, llrs: np.ndarray, u: np.ndarray) -> np.ndarray:
    """
    Genie-aided decoding: every index is decided from its LLR, then replaced by the
    true bit of `u`. Returns the per-index error indicators (shape (B, n) for a batch).
    """

    llrs, single = _as_batch(code, llrs)
    truth = np.atleast_2d(np.asarray(u, dtype=np.int64))
    assert truth.shape == llrs.shape, f"Expected true bits of shape {llrs.shape}, got {truth.shape}"
    errors = np.zeros(llrs.shape, dtype=bool)
    _successive_cancellation(code, llrs, code.frozen, truth, errors, 0)
    return errors[0] if single else errors
