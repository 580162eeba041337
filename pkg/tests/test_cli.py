import json

from conftest import draw_stroke, make_session
from sketchloop.cli import main
from sketchloop.png import decode_png


def recorded_session(tmp_path):
    log_dir = tmp_path / "sess"
    session = make_session(log_dir=str(log_dir))
    draw_stroke(session, [(5, 5), (60, 40)])
    session.handle("open_chatbot", {})
    session.handle("chat_submit", {"mode": "IMAGE", "text": "toaster"})
    image_ref = session.history.turns[-1].image_ref
    session.handle("export_image", {"artifact_id": image_ref, "region": [5, 5, 40, 40]})
    session.close()
    return session, log_dir


def test_replay_command(tmp_path, capsys):
    session, log_dir = recorded_session(tmp_path)
    out_path = tmp_path / "snapshot.json"
    assert main(["replay", str(log_dir), "--out", str(out_path)]) == 0
    printed = capsys.readouterr().out
    assert "snapshot sha256:" in printed
    assert out_path.read_bytes() == session.snapshot_bytes()
    snapshot = json.loads(out_path.read_text())
    assert snapshot["session_id"] == session.session_id


def test_replay_command_accepts_log_file_path(tmp_path):
    _, log_dir = recorded_session(tmp_path)
    assert main(["replay", str(log_dir / "events.ndjson")]) == 0


def test_replay_command_verifies_against_scripts(tmp_path):
    from sketchloop.providers import MockScripts

    _, log_dir = recorded_session(tmp_path)
    scripts_path = tmp_path / "scripts.json"
    # the session ran on default mocks; default mocks must verify cleanly
    MockScripts().to_file(scripts_path)
    assert main(["replay", str(log_dir), str(scripts_path)]) == 0


def test_render_command_full_and_at(tmp_path):
    session, log_dir = recorded_session(tmp_path)
    out = tmp_path / "final.png"
    assert main(["render", str(log_dir), "--out", str(out)]) == 0
    w, h, pixels = decode_png(out.read_bytes())
    assert (w, h) == (128, 96)
    assert pixels != b"\xff" * (w * h * 4)  # stroke plus exported image are inked

    early = tmp_path / "early.png"
    assert main(["render", str(log_dir), "--at", "0", "--out", str(early)]) == 0
    _, _, pixels = decode_png(early.read_bytes())
    assert pixels == b"\xff" * (128 * 96 * 4)  # nothing drawn at the first record


def test_render_at_out_of_range(tmp_path, capsys):
    _, log_dir = recorded_session(tmp_path)
    assert main(["render", str(log_dir), "--at", "9999", "--out", "x.png"]) == 1
    assert "error:" in capsys.readouterr().err


def test_replay_missing_log(tmp_path, capsys):
    assert main(["replay", str(tmp_path / "nope")]) == 1
    assert "error:" in capsys.readouterr().err
