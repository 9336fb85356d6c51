"""Single-file checkpoint container with byte-stable serialization.

torch.save embeds storage keys that differ between processes, so checkpoints
are packed into an npz archive instead: every tensor becomes a named array and
the remaining structure (nested dicts, lists, tuples, scalars) is stored as a
JSON skeleton with tensor placeholders. Saving the same state twice produces
identical bytes, and dict keys keep their types (optimizer state uses ints).
"""

import json

import numpy as np
import torch


def _encode(obj, tensors):
    if torch.is_tensor(obj):
        tensors.append(obj.detach().cpu().numpy())
        return {"__tensor__": len(tensors) - 1}
    if isinstance(obj, dict):
        return {"__dict__": [[_encode(k, tensors), _encode(v, tensors)] for k, v in obj.items()]}
    if isinstance(obj, tuple):
        return {"__tuple__": [_encode(v, tensors) for v in obj]}
    if isinstance(obj, list):
        return [_encode(v, tensors) for v in obj]
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    raise TypeError(f"cannot serialize a {type(obj).__name__} into a checkpoint")


def _decode(obj, arrays):
    if isinstance(obj, dict):
        if "__tensor__" in obj:
            return torch.from_numpy(arrays[f"t{obj['__tensor__']}"].copy())
        if "__dict__" in obj:
            return {_decode(k, arrays): _decode(v, arrays) for k, v in obj["__dict__"]}
        if "__tuple__" in obj:
            return tuple(_decode(v, arrays) for v in obj["__tuple__"])
        raise ValueError("unrecognized checkpoint skeleton node")
    if isinstance(obj, list):
        return [_decode(v, arrays) for v in obj]
    return obj


def save_checkpoint(state, path):
    tensors = []
    skeleton = _encode(state, tensors)
    meta = json.dumps(skeleton, separators=(",", ":")).encode()
    arrays = {f"t{i}": arr for i, arr in enumerate(tensors)}
    with open(path, "wb") as f:
        np.savez(f, __meta__=np.frombuffer(meta, dtype=np.uint8), **arrays)


def load_checkpoint(path):
    with np.load(path) as z:
        skeleton = json.loads(bytes(z["__meta__"]).decode())
        arrays = {k: z[k] for k in z.files if k != "__meta__"}
    return _decode(skeleton, arrays)
