import io
import json

import pytest

from widthjump.protocol import (
    MalformedRecordError,
    ProtocolError,
    error_record,
    q_record,
    read_message,
    validate_record,
    write_message,
)


class TestFraming:
    def test_round_trip(self):
        buf = io.BytesIO()
        rec = {"v": 1, "kind": "q", "values": [1.0, -2.5]}
        write_message(buf, rec)
        buf.seek(0)
        assert read_message(buf) == rec
        assert read_message(buf) is None  # clean EOF

    def test_frame_layout(self):
        buf = io.BytesIO()
        write_message(buf, {"a": 1})
        raw = buf.getvalue()
        payload = json.dumps({"a": 1}, separators=(",", ":")).encode()
        assert raw == b"%d\n%s\n" % (len(payload), payload)

    def test_many_messages(self):
        buf = io.BytesIO()
        recs = [q_record([float(i)]) for i in range(5)]
        for r in recs:
            write_message(buf, r)
        buf.seek(0)
        assert [read_message(buf) for _ in range(5)] == recs

    def test_bad_header(self):
        with pytest.raises(ProtocolError, match="bad frame header"):
            read_message(io.BytesIO(b"not-a-number\n{}\n"))

    def test_truncated_payload(self):
        with pytest.raises(ProtocolError, match="truncated"):
            read_message(io.BytesIO(b"50\n{\"v\":1}"))

    def test_missing_trailer(self):
        buf = io.BytesIO(b'7\n{"a":1}X')
        with pytest.raises(ProtocolError, match="trailer"):
            read_message(buf)

    def test_payload_not_json(self):
        buf = io.BytesIO()
        payload = b"{{{{"
        buf.write(b"%d\n%s\n" % (len(payload), payload))
        buf.seek(0)
        with pytest.raises(MalformedRecordError, match="not valid JSON"):
            read_message(buf)

    def test_payload_not_object(self):
        buf = io.BytesIO()
        payload = b"[1,2]"
        buf.write(b"%d\n%s\n" % (len(payload), payload))
        buf.seek(0)
        with pytest.raises(MalformedRecordError, match="JSON object"):
            read_message(buf)


class TestRecordValidation:
    def test_q_record(self):
        rec = q_record([1, 2.5])
        assert rec["values"] == [1.0, 2.5]
        assert validate_record(rec) is rec

    def test_error_record(self):
        rec = error_record("boom")
        assert validate_record(rec) is rec
        assert rec["message"] == "boom"

    def test_q_needs_numbers(self):
        with pytest.raises(MalformedRecordError, match="numeric"):
            validate_record({"v": 1, "kind": "q", "values": ["x"]})

    def test_error_needs_message(self):
        with pytest.raises(MalformedRecordError, match="message"):
            validate_record({"v": 1, "kind": "error"})

    def test_unknown_kind(self):
        with pytest.raises(MalformedRecordError, match="unknown record kind"):
            validate_record({"v": 1, "kind": "blob"})

    def test_version_gate(self):
        with pytest.raises(MalformedRecordError, match="wire version"):
            validate_record({"v": 2, "kind": "q", "values": []})

    def test_graph_pair_needs_sides(self):
        with pytest.raises(MalformedRecordError, match="lacks 'right'"):
            validate_record(
                {"v": 1, "kind": "graph_pair",
                 "left": {"nodes": [], "edges": []}}
            )

    def test_offset_in_message(self):
        err = MalformedRecordError("bad", 42)
        assert "byte offset 42" in str(err)
        assert err.offset == 42
