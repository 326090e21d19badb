"""Standalone FTNS / FADP reader: prints a JSON summary of one file."""
import json
import struct
import sys


def read_ftns(buf, pos):
    assert buf[pos:pos + 4] == b"FTNS", "bad FTNS magic"
    version, rank = struct.unpack_from("<II", buf, pos + 4)
    assert version == 1, "unsupported FTNS version"
    dims = list(struct.unpack_from("<%dI" % rank, buf, pos + 12))
    count = 1
    for d in dims:
        count *= d
    start = pos + 12 + 4 * rank
    values = struct.unpack_from("<%df" % count, buf, start)
    return {"dims": dims, "sum": sum(values), "first": values[0] if values else None}, start + 4 * count


def read_fadp(buf):
    assert buf[:4] == b"FADP", "bad FADP magic"
    version, header_len = struct.unpack_from("<II", buf, 4)
    assert version == 1, "unsupported FADP version"
    header = json.loads(buf[12:12 + header_len].decode("utf-8"))
    pos, tensors = 12 + header_len, []
    while pos < len(buf):
        (name_len,) = struct.unpack_from("<I", buf, pos)
        name = buf[pos + 4:pos + 4 + name_len].decode("utf-8")
        summary, pos = read_ftns(buf, pos + 4 + name_len)
        summary["name"] = name
        tensors.append(summary)
    return {"format": "FADP", "header": header, "tensors": tensors}


data = open(sys.argv[1], "rb").read()
if data[:4] == b"FTNS":
    result, end = read_ftns(data, 0)
    assert end == len(data), "trailing bytes after FTNS payload"
    result["format"] = "FTNS"
else:
    result = read_fadp(data)
print(json.dumps(result))
