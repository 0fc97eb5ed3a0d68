"""Desk-scale frozen encoder-decoder with trainable bottleneck adapters.

The base model (embeddings, attention, feed-forward, layer norms, output
projection) is initialized deterministically from a seed and never updated;
adapters sit after the attention block and after the feed-forward block of
each active layer (on the post-add-and-norm stream; decoder cross-attention
carries none) and are the only trainable tensors. Forward and backward
passes are hand-written numpy so gradients can be audited against central
finite differences.

Base parameters are drawn from the seed before any adapter parameters, so
two models built from the same seed share an identical base regardless of
which layers carry adapters. Up-projections start at zero, making a freshly
built adapted model bit-identical to its adapter-free twin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .adapters import AdapterSet, ModelDims
from .errors import AdapterQaError, InputError

BOS_ID = 1


class InvalidConfig(InputError):
    """Toy model configuration is inconsistent."""


class Divergence(AdapterQaError):
    """Training loss became non-finite."""


@dataclass
class ToyConfig:
    """Default configuration is small enough for finite-difference checks."""

    d_model: int = 32
    bottleneck: int = 8
    n_encoder_layers: int = 2
    n_decoder_layers: int = 2
    n_heads: int = 2
    d_ff: int | None = None  # defaults to 2 * d_model
    vocab_size: int = 64
    max_len: int = 32
    seed: int = 6
    precision: str = "double"
    adapter_set: AdapterSet | None = None  # None means adapters on every layer

    def resolved_d_ff(self) -> int:
        return 2 * self.d_model if self.d_ff is None else self.d_ff

    def dtype(self):
        if self.precision == "double":
            return np.float64
        if self.precision == "single":
            return np.float32
        raise InvalidConfig(f"precision must be 'single' or 'double', got {self.precision!r}")


class Parameter:
    """Named tensor with a gradient buffer and a frozen/trainable tag."""

    __slots__ = ("name", "value", "grad", "trainable")

    def __init__(self, name: str, value: np.ndarray, trainable: bool = False):
        self.name = name
        self.value = value
        self.grad = np.zeros_like(value)
        self.trainable = trainable

    def __repr__(self):
        tag = "trainable" if self.trainable else "frozen"
        return f"Parameter({self.name}, shape={self.value.shape}, {tag})"


class Linear:
    def __init__(self, name: str, w: np.ndarray, b: np.ndarray, trainable: bool = False):
        self.w = Parameter(f"{name}.w", w, trainable)
        self.b = Parameter(f"{name}.b", b, trainable)
        self._x: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._x = x
        return x @ self.w.value + self.b.value

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        if self.w.trainable:
            d_in = self._x.shape[-1]
            d_val = d_out.shape[-1]
            self.w.grad += self._x.reshape(-1, d_in).T @ d_out.reshape(-1, d_val)
            self.b.grad += d_out.reshape(-1, d_val).sum(axis=0)
        return d_out @ self.w.value.T

    def parameters(self) -> list[Parameter]:
        return [self.w, self.b]


class LayerNorm:
    def __init__(self, name: str, d: int, dtype, eps: float = 1e-5):
        self.gamma = Parameter(f"{name}.gamma", np.ones(d, dtype=dtype))
        self.beta = Parameter(f"{name}.beta", np.zeros(d, dtype=dtype))
        self.eps = eps
        self._xhat: np.ndarray | None = None
        self._inv_std: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        mu = x.mean(axis=-1, keepdims=True)
        centered = x - mu
        var = (centered * centered).mean(axis=-1, keepdims=True)
        self._inv_std = 1.0 / np.sqrt(var + self.eps)
        self._xhat = centered * self._inv_std
        return self.gamma.value * self._xhat + self.beta.value

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        d_xhat = d_out * self.gamma.value
        mean_d = d_xhat.mean(axis=-1, keepdims=True)
        mean_dx = (d_xhat * self._xhat).mean(axis=-1, keepdims=True)
        return self._inv_std * (d_xhat - mean_d - self._xhat * mean_dx)

    def parameters(self) -> list[Parameter]:
        return [self.gamma, self.beta]


class Attention:
    """Multi-head scaled dot-product attention with frozen projections."""

    def __init__(self, name: str, d_model: int, n_heads: int, rng: np.random.Generator,
                 dtype, causal: bool = False):
        scale = 1.0 / math.sqrt(d_model)

        def proj(suffix: str) -> Linear:
            w = (rng.standard_normal((d_model, d_model)) * scale).astype(dtype)
            return Linear(f"{name}.{suffix}", w, np.zeros(d_model, dtype=dtype))

        self.q_proj = proj("w_q")
        self.k_proj = proj("w_k")
        self.v_proj = proj("w_v")
        self.o_proj = proj("w_o")
        self.n_heads = n_heads
        self.d_head = d_model // n_heads
        self.causal = causal
        self._cache: tuple | None = None

    def _split(self, x: np.ndarray) -> np.ndarray:
        b, t, d = x.shape
        return x.reshape(b, t, self.n_heads, self.d_head).transpose(0, 2, 1, 3)

    def _merge(self, x: np.ndarray) -> np.ndarray:
        b, h, t, dh = x.shape
        return x.transpose(0, 2, 1, 3).reshape(b, t, h * dh)

    def forward(self, x_q: np.ndarray, x_kv: np.ndarray) -> np.ndarray:
        q = self._split(self.q_proj.forward(x_q))
        k = self._split(self.k_proj.forward(x_kv))
        v = self._split(self.v_proj.forward(x_kv))
        inv_sqrt = 1.0 / math.sqrt(self.d_head)
        scores = (q @ k.transpose(0, 1, 3, 2)) * inv_sqrt
        if self.causal:
            t = scores.shape[-1]
            mask = np.tril(np.ones((t, t), dtype=bool))
            scores = np.where(mask, scores, -np.inf)
        scores_max = scores.max(axis=-1, keepdims=True)
        exp_scores = np.exp(scores - scores_max)
        attn = exp_scores / exp_scores.sum(axis=-1, keepdims=True)
        context = attn @ v
        self._cache = (q, k, v, attn, inv_sqrt)
        return self.o_proj.forward(self._merge(context))

    def backward(self, d_out: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        q, k, v, attn, inv_sqrt = self._cache
        d_context = self._split(self.o_proj.backward(d_out))
        d_attn = d_context @ v.transpose(0, 1, 3, 2)
        d_v = attn.transpose(0, 1, 3, 2) @ d_context
        d_scores = attn * (d_attn - (d_attn * attn).sum(axis=-1, keepdims=True))
        d_q = (d_scores @ k) * inv_sqrt
        d_k = (d_scores.transpose(0, 1, 3, 2) @ q) * inv_sqrt
        d_xq = self.q_proj.backward(self._merge(d_q))
        d_xkv = self.k_proj.backward(self._merge(d_k)) + self.v_proj.backward(self._merge(d_v))
        return d_xq, d_xkv

    def parameters(self) -> list[Parameter]:
        return [
            *self.q_proj.parameters(),
            *self.k_proj.parameters(),
            *self.v_proj.parameters(),
            *self.o_proj.parameters(),
        ]


class FeedForward:
    def __init__(self, name: str, d_model: int, d_ff: int, rng: np.random.Generator, dtype):
        w_in = (rng.standard_normal((d_model, d_ff)) / math.sqrt(d_model)).astype(dtype)
        w_out = (rng.standard_normal((d_ff, d_model)) / math.sqrt(d_ff)).astype(dtype)
        self.lin_in = Linear(f"{name}.w_in", w_in, np.zeros(d_ff, dtype=dtype))
        self.lin_out = Linear(f"{name}.w_out", w_out, np.zeros(d_model, dtype=dtype))
        self._mask: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        pre = self.lin_in.forward(x)
        self._mask = pre > 0
        return self.lin_out.forward(np.maximum(pre, 0.0))

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        d_hidden = self.lin_out.backward(d_out) * self._mask
        return self.lin_in.backward(d_hidden)

    def parameters(self) -> list[Parameter]:
        return [*self.lin_in.parameters(), *self.lin_out.parameters()]


class AdapterModule:
    """Trainable residual bottleneck: x + relu(x@w_down + b_down)@w_up + b_up."""

    def __init__(self, name: str, d_model: int, bottleneck: int, rng: np.random.Generator, dtype):
        w_down = (rng.standard_normal((d_model, bottleneck)) / math.sqrt(d_model)).astype(dtype)
        self.down = Linear(f"{name}.down", w_down, np.zeros(bottleneck, dtype=dtype), trainable=True)
        self.up = Linear(
            f"{name}.up",
            np.zeros((bottleneck, d_model), dtype=dtype),
            np.zeros(d_model, dtype=dtype),
            trainable=True,
        )
        self._mask: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        pre = self.down.forward(x)
        self._mask = pre > 0
        return x + self.up.forward(np.maximum(pre, 0.0))

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        d_hidden = self.up.backward(d_out) * self._mask
        return d_out + self.down.backward(d_hidden)

    def randomize(self, rng: np.random.Generator, scale: float = 0.1):
        """Replace all four tensors with random values (for gradient audits;
        zero up-projections would hide the down-projection gradients)."""
        for param in self.parameters():
            param.value[...] = (rng.standard_normal(param.value.shape) * scale).astype(
                param.value.dtype
            )

    def parameters(self) -> list[Parameter]:
        return [*self.down.parameters(), *self.up.parameters()]


class EncoderLayer:
    def __init__(self, name: str, cfg: ToyConfig, rng: np.random.Generator, dtype):
        self.attn = Attention(f"{name}.self_attn", cfg.d_model, cfg.n_heads, rng, dtype)
        self.norm_attn = LayerNorm(f"{name}.norm_attn", cfg.d_model, dtype)
        self.ffn = FeedForward(f"{name}.ffn", cfg.d_model, cfg.resolved_d_ff(), rng, dtype)
        self.norm_ffn = LayerNorm(f"{name}.norm_ffn", cfg.d_model, dtype)
        self.adapter_attn: AdapterModule | None = None
        self.adapter_ffn: AdapterModule | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        h = self.norm_attn.forward(x + self.attn.forward(x, x))
        if self.adapter_attn is not None:
            h = self.adapter_attn.forward(h)
        h2 = self.norm_ffn.forward(h + self.ffn.forward(h))
        if self.adapter_ffn is not None:
            h2 = self.adapter_ffn.forward(h2)
        return h2

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        if self.adapter_ffn is not None:
            d_out = self.adapter_ffn.backward(d_out)
        d_sum = self.norm_ffn.backward(d_out)
        d_h = d_sum + self.ffn.backward(d_sum)
        if self.adapter_attn is not None:
            d_h = self.adapter_attn.backward(d_h)
        d_res = self.norm_attn.backward(d_h)
        d_xq, d_xkv = self.attn.backward(d_res)
        return d_res + d_xq + d_xkv

    def adapters(self) -> list[AdapterModule]:
        return [a for a in (self.adapter_attn, self.adapter_ffn) if a is not None]

    def parameters(self) -> list[Parameter]:
        params = [*self.attn.parameters(), *self.norm_attn.parameters(),
                  *self.ffn.parameters(), *self.norm_ffn.parameters()]
        for adapter in self.adapters():
            params.extend(adapter.parameters())
        return params


class DecoderLayer:
    def __init__(self, name: str, cfg: ToyConfig, rng: np.random.Generator, dtype):
        self.self_attn = Attention(f"{name}.self_attn", cfg.d_model, cfg.n_heads, rng, dtype,
                                   causal=True)
        self.norm_self = LayerNorm(f"{name}.norm_self", cfg.d_model, dtype)
        self.cross_attn = Attention(f"{name}.cross_attn", cfg.d_model, cfg.n_heads, rng, dtype)
        self.norm_cross = LayerNorm(f"{name}.norm_cross", cfg.d_model, dtype)
        self.ffn = FeedForward(f"{name}.ffn", cfg.d_model, cfg.resolved_d_ff(), rng, dtype)
        self.norm_ffn = LayerNorm(f"{name}.norm_ffn", cfg.d_model, dtype)
        self.adapter_attn: AdapterModule | None = None
        self.adapter_ffn: AdapterModule | None = None

    def forward(self, x: np.ndarray, enc_out: np.ndarray) -> np.ndarray:
        h1 = self.norm_self.forward(x + self.self_attn.forward(x, x))
        if self.adapter_attn is not None:
            h1 = self.adapter_attn.forward(h1)
        h2 = self.norm_cross.forward(h1 + self.cross_attn.forward(h1, enc_out))
        h3 = self.norm_ffn.forward(h2 + self.ffn.forward(h2))
        if self.adapter_ffn is not None:
            h3 = self.adapter_ffn.forward(h3)
        return h3

    def backward(self, d_out: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if self.adapter_ffn is not None:
            d_out = self.adapter_ffn.backward(d_out)
        d_sum = self.norm_ffn.backward(d_out)
        d_h2 = d_sum + self.ffn.backward(d_sum)
        d_res2 = self.norm_cross.backward(d_h2)
        d_q, d_enc = self.cross_attn.backward(d_res2)
        d_h1 = d_res2 + d_q
        if self.adapter_attn is not None:
            d_h1 = self.adapter_attn.backward(d_h1)
        d_res1 = self.norm_self.backward(d_h1)
        d_xq, d_xkv = self.self_attn.backward(d_res1)
        return d_res1 + d_xq + d_xkv, d_enc

    def adapters(self) -> list[AdapterModule]:
        return [a for a in (self.adapter_attn, self.adapter_ffn) if a is not None]

    def parameters(self) -> list[Parameter]:
        params = [*self.self_attn.parameters(), *self.norm_self.parameters(),
                  *self.cross_attn.parameters(), *self.norm_cross.parameters(),
                  *self.ffn.parameters(), *self.norm_ffn.parameters()]
        for adapter in self.adapters():
            params.extend(adapter.parameters())
        return params


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean cross-entropy over all positions plus the logits gradient."""
    z = logits - logits.max(axis=-1, keepdims=True)
    exp_z = np.exp(z)
    sum_exp = exp_z.sum(axis=-1, keepdims=True)
    log_probs = z - np.log(sum_exp)
    n = labels.size
    vocab = logits.shape[-1]
    flat_labels = labels.reshape(-1)
    flat_log_probs = log_probs.reshape(-1, vocab)
    loss = -flat_log_probs[np.arange(n), flat_labels].mean()
    d_flat = (exp_z / sum_exp).reshape(-1, vocab)
    d_flat[np.arange(n), flat_labels] -= 1.0
    return float(loss), (d_flat / n).reshape(logits.shape)


class ToyModel:
    """Frozen encoder-decoder plus trainable adapters. Build via
    ``build_toy_model`` so the configuration is validated."""

    def __init__(self, cfg: ToyConfig):
        dtype = cfg.dtype()
        rng = np.random.default_rng(cfg.seed)
        self.cfg = cfg
        d = cfg.d_model

        # Base parameters first, in a fixed order, so the frozen model is
        # identical for every adapter configuration under one seed.
        self.tok_emb = Parameter(
            "embed.tokens", (rng.standard_normal((cfg.vocab_size, d)) / math.sqrt(d)).astype(dtype)
        )
        self.pos_emb = Parameter(
            "embed.positions", (rng.standard_normal((cfg.max_len, d)) / math.sqrt(d)).astype(dtype)
        )
        self.encoder = [EncoderLayer(f"encoder.{i}", cfg, rng, dtype)
                        for i in range(cfg.n_encoder_layers)]
        self.decoder = [DecoderLayer(f"decoder.{i}", cfg, rng, dtype)
                        for i in range(cfg.n_decoder_layers)]
        self.out_proj = Linear(
            "output",
            (rng.standard_normal((d, cfg.vocab_size)) / math.sqrt(d)).astype(dtype),
            np.zeros(cfg.vocab_size, dtype=dtype),
        )

        self.adapter_set = (
            cfg.adapter_set if cfg.adapter_set is not None else AdapterSet.full(self.dims)
        ).check(self.dims)
        first_dec = self.dims.first_decoder_layer
        for i, layer in enumerate(self.encoder):
            if i in self.adapter_set.encoder_layers:
                layer.adapter_attn = AdapterModule(
                    f"encoder.{i}.adapter_attn", d, cfg.bottleneck, rng, dtype)
                layer.adapter_ffn = AdapterModule(
                    f"encoder.{i}.adapter_ffn", d, cfg.bottleneck, rng, dtype)
        for i, layer in enumerate(self.decoder):
            if first_dec + i in self.adapter_set.decoder_layers:
                layer.adapter_attn = AdapterModule(
                    f"decoder.{i}.adapter_attn", d, cfg.bottleneck, rng, dtype)
                layer.adapter_ffn = AdapterModule(
                    f"decoder.{i}.adapter_ffn", d, cfg.bottleneck, rng, dtype)

        self._d_logits: np.ndarray | None = None
        self._enc_shape: tuple | None = None

    @property
    def dims(self) -> ModelDims:
        return ModelDims(
            d_model=self.cfg.d_model,
            bottleneck=self.cfg.bottleneck,
            n_encoder_layers=self.cfg.n_encoder_layers,
            n_decoder_layers=self.cfg.n_decoder_layers,
            adapters_per_layer=2,
            base_total_params=sum(p.value.size for p in self.parameters() if not p.trainable),
        )

    def parameters(self) -> list[Parameter]:
        params = [self.tok_emb, self.pos_emb]
        for layer in self.encoder:
            params.extend(layer.parameters())
        for layer in self.decoder:
            params.extend(layer.parameters())
        params.extend(self.out_proj.parameters())
        return params

    def trainable_parameters(self) -> list[Parameter]:
        return [p for p in self.parameters() if p.trainable]

    def adapters(self) -> list[AdapterModule]:
        modules = []
        for layer in [*self.encoder, *self.decoder]:
            modules.extend(layer.adapters())
        return modules

    def zero_grads(self):
        for p in self.parameters():
            p.grad[...] = 0.0

    def randomize_adapters(self, seed: int, scale: float = 0.1):
        rng = np.random.default_rng(seed)
        for adapter in self.adapters():
            adapter.randomize(rng, scale)

    def _check_ids(self, ids: np.ndarray, what: str) -> np.ndarray:
        ids = np.asarray(ids)
        if ids.ndim != 2 or ids.size == 0:
            raise InputError(f"{what} ids must be a nonempty (batch, length) array, got shape {ids.shape}")
        if ids.shape[1] > self.cfg.max_len:
            raise InputError(
                f"{what} length {ids.shape[1]} exceeds maximum sequence length {self.cfg.max_len}"
            )
        if ids.min() < 0 or ids.max() >= self.cfg.vocab_size:
            raise InputError(f"{what} ids out of vocabulary range [0, {self.cfg.vocab_size})")
        return ids

    def _embed(self, ids: np.ndarray) -> np.ndarray:
        return self.tok_emb.value[ids] + self.pos_emb.value[: ids.shape[1]][None, :, :]

    def forward(self, source_ids: np.ndarray, target_ids: np.ndarray) -> tuple[float, np.ndarray]:
        """Teacher-forced cross-entropy and logits; caches for backward()."""
        source_ids = self._check_ids(source_ids, "source")
        target_ids = self._check_ids(target_ids, "target")
        if source_ids.shape[0] != target_ids.shape[0]:
            raise InputError("source and target batch sizes differ")

        enc_x = self._embed(source_ids)
        for layer in self.encoder:
            enc_x = layer.forward(enc_x)
        self._enc_shape = enc_x.shape

        decoder_input = np.concatenate(
            [np.full((target_ids.shape[0], 1), BOS_ID, dtype=target_ids.dtype),
             target_ids[:, :-1]],
            axis=1,
        )
        dec_x = self._embed(decoder_input)
        for layer in self.decoder:
            dec_x = layer.forward(dec_x, enc_x)
        logits = self.out_proj.forward(dec_x)
        loss, self._d_logits = softmax_cross_entropy(logits, target_ids)
        return loss, logits

    def backward(self):
        """Accumulate gradients into trainable parameters (frozen tensors
        are never touched, so their gradients stay exactly zero)."""
        d = self.out_proj.backward(self._d_logits)
        d_enc_total = np.zeros(self._enc_shape, dtype=self._d_logits.dtype)
        for layer in reversed(self.decoder):
            d, d_enc = layer.backward(d)
            d_enc_total += d_enc
        d = d_enc_total
        for layer in reversed(self.encoder):
            d = layer.backward(d)

    def forward_backward(self, source_ids: np.ndarray, target_ids: np.ndarray) -> float:
        loss, _ = self.forward(source_ids, target_ids)
        self.backward()
        return loss


def build_toy_model(cfg: ToyConfig) -> ToyModel:
    """Validate the configuration and build the model deterministically."""
    for name in ("d_model", "bottleneck", "n_encoder_layers", "n_decoder_layers",
                 "n_heads", "vocab_size", "max_len"):
        value = getattr(cfg, name)
        if not isinstance(value, int) or value < 1:
            raise InvalidConfig(f"{name} must be a positive integer, got {value!r}")
    if cfg.d_model % cfg.n_heads != 0:
        raise InvalidConfig(f"d_model {cfg.d_model} is not divisible by n_heads {cfg.n_heads}")
    if cfg.vocab_size <= BOS_ID + 1:
        raise InvalidConfig(f"vocab_size must exceed {BOS_ID + 1} to leave room for content tokens")
    if cfg.d_ff is not None and cfg.d_ff < 1:
        raise InvalidConfig(f"d_ff must be positive when given, got {cfg.d_ff}")
    cfg.dtype()  # validates precision
    return ToyModel(cfg)


@dataclass(frozen=True)
class TensorInfo:
    name: str
    trainable: bool
    n_elements: int


@dataclass(frozen=True)
class FreezeReport:
    tensors: list[TensorInfo]
    trainable_total: int
    frozen_total: int

    @property
    def trainable_percent_of_base(self) -> float:
        if self.frozen_total == 0:
            return 0.0
        return round(100.0 * self.trainable_total / self.frozen_total, 2)

    def to_json_dict(self) -> dict:
        return {
            "tensors": [
                {"name": t.name, "tag": "trainable" if t.trainable else "frozen",
                 "elements": t.n_elements}
                for t in self.tensors
            ],
            "trainable_total": self.trainable_total,
            "frozen_total": self.frozen_total,
            "trainable_percent_of_base": self.trainable_percent_of_base,
        }


def freeze_report(model: ToyModel) -> FreezeReport:
    """Per-tensor tags and element counts plus trainable/frozen totals."""
    tensors = [TensorInfo(p.name, p.trainable, p.value.size) for p in model.parameters()]
    return FreezeReport(
        tensors=tensors,
        trainable_total=sum(t.n_elements for t in tensors if t.trainable),
        frozen_total=sum(t.n_elements for t in tensors if not t.trainable),
    )


@dataclass(frozen=True)
class GradCheckReport:
    max_rel_error: float
    worst_parameter: str
    n_params_checked: int
    eps: float
    per_parameter: dict[str, float]

    def to_json_dict(self) -> dict:
        return {
            "max_rel_error": self.max_rel_error,
            "worst_parameter": self.worst_parameter,
            "n_params_checked": self.n_params_checked,
            "eps": self.eps,
            "per_parameter": self.per_parameter,
        }


def grad_check(model: ToyModel, source_ids: np.ndarray, target_ids: np.ndarray,
               eps: float = 1e-5) -> GradCheckReport:
    """Compare analytic gradients of every trainable scalar against central
    finite differences.

    The relative error uses an absolute floor so finite-difference noise on
    near-zero gradients is not amplified. Run after ``randomize_adapters``:
    with zero up-projections the down-projection gradients vanish and the
    check is vacuous there.
    """
    model.zero_grads()
    model.forward_backward(source_ids, target_ids)
    analytic = {p.name: p.grad.copy() for p in model.trainable_parameters()}

    per_parameter: dict[str, float] = {}
    worst_name = ""
    worst_err = 0.0
    n_checked = 0
    for param in model.trainable_parameters():
        flat = param.value.reshape(-1)
        flat_analytic = analytic[param.name].reshape(-1)
        param_err = 0.0
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + eps
            loss_plus, _ = model.forward(source_ids, target_ids)
            flat[i] = original - eps
            loss_minus, _ = model.forward(source_ids, target_ids)
            flat[i] = original
            numeric = (loss_plus - loss_minus) / (2.0 * eps)
            a = flat_analytic[i]
            err = abs(a - numeric) / max(abs(a), abs(numeric), 1e-3)
            param_err = max(param_err, err)
            n_checked += 1
        per_parameter[param.name] = param_err
        if param_err >= worst_err:
            worst_err = param_err
            worst_name = param.name
    return GradCheckReport(
        max_rel_error=worst_err,
        worst_parameter=worst_name,
        n_params_checked=n_checked,
        eps=eps,
        per_parameter=per_parameter,
    )


@dataclass
class TrainConfig:
    learning_rate: float = 1e-2
    steps: int = 200
    optimizer: str = "adam"  # or "sgd"
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8


@dataclass
class TrainLog:
    losses: list[float] = field(default_factory=list)  # loss before each update
    final_loss: float = float("nan")

    @property
    def initial_loss(self) -> float:
        return self.losses[0] if self.losses else float("nan")

    def to_json_dict(self) -> dict:
        return {
            "losses": self.losses,
            "initial_loss": self.initial_loss,
            "final_loss": self.final_loss,
        }


def train_adapters(model: ToyModel, source_ids: np.ndarray, target_ids: np.ndarray,
                   cfg: TrainConfig) -> TrainLog:
    """Full-batch gradient descent on the trainable parameters only."""
    if cfg.optimizer not in ("adam", "sgd"):
        raise InvalidConfig(f"optimizer must be 'adam' or 'sgd', got {cfg.optimizer!r}")
    params = model.trainable_parameters()
    adam_m = [np.zeros_like(p.value) for p in params]
    adam_v = [np.zeros_like(p.value) for p in params]

    log = TrainLog()
    for step in range(cfg.steps):
        model.zero_grads()
        loss = model.forward_backward(source_ids, target_ids)
        if not math.isfinite(loss):
            raise Divergence(f"loss became non-finite at step {step}")
        log.losses.append(loss)
        if cfg.optimizer == "sgd":
            for p in params:
                p.value -= cfg.learning_rate * p.grad
        else:
            t = step + 1
            for p, m, v in zip(params, adam_m, adam_v):
                m *= cfg.beta1
                m += (1 - cfg.beta1) * p.grad
                v *= cfg.beta2
                v += (1 - cfg.beta2) * (p.grad * p.grad)
                m_hat = m / (1 - cfg.beta1 ** t)
                v_hat = v / (1 - cfg.beta2 ** t)
                p.value -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)

    final_loss, _ = model.forward(source_ids, target_ids)
    if not math.isfinite(final_loss):
        raise Divergence("final loss is non-finite")
    log.final_loss = final_loss
    return log


def make_copy_task(n_examples: int = 32, seq_len: int = 6, vocab_size: int = 64,
                   seed: int = 6) -> tuple[np.ndarray, np.ndarray]:
    """Random sequences with target = source; token ids avoid the BOS id."""
    rng = np.random.default_rng(seed)
    source = rng.integers(BOS_ID + 1, vocab_size, size=(n_examples, seq_len), dtype=np.int64)
    return source, source.copy()
