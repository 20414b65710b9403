"""Regenerates the Mileage traces and screenshot PNGs under fixtures/.

Run from the repository root: python3 fixtures/generate.py
Then rebuild the model with: burt build-model --traces fixtures/traces/mileage --out fixtures/models/mileage/model.json
"""
import json
import os
import struct
import zlib

ROOT = os.path.dirname(os.path.abspath(__file__))
TRACES = os.path.join(ROOT, "traces", "mileage")
ASSETS = os.path.join(ROOT, "models", "mileage")
APP = {"name": "Mileage", "version": "3.1.1", "package": "com.evancharlton.mileage"}
PKG = APP["package"]


def node(kind, bounds, label="", id_name="", description="", children=()):
    n = {"kind": "android.widget." + kind, "bounds": list(bounds)}
    if label:
        n["label"] = label
    if id_name:
        n["id_name"] = id_name
    if description:
        n["description"] = description
    if children:
        n["children"] = list(children)
    return n


def tabs():
    return node("TabWidget", (0, 63, 1080, 210), children=[
        node("TextView", (0, 63, 360, 210), "Fillup", "tab_fillup"),
        node("TextView", (360, 63, 720, 210), "History", "tab_history"),
        node("TextView", (720, 63, 1080, 210), "Statistics", "tab_statistics"),
    ])


SCREENS = {
    "launcher": ("com.android.launcher3.Launcher", [
        node("FrameLayout", (0, 0, 1080, 1920), children=[
            node("ImageView", (400, 800, 680, 1080)),
        ]),
    ], (40, 40, 60)),
    "fillup": (PKG + ".FillupActivity", [
        node("LinearLayout", (0, 0, 1080, 1920), children=[
            tabs(),
            node("EditText", (40, 260, 1040, 380), id_name="price_per_unit", description="Price per unit"),
            node("EditText", (40, 420, 1040, 540), id_name="volume", description="Volume"),
            node("EditText", (40, 580, 1040, 700), id_name="odometer", description="Odometer"),
            node("CheckBox", (40, 740, 1040, 840), "Partial tank", "partial"),
            node("Button", (40, 900, 1040, 1020), "Save Fillup", "save_btn"),
        ]),
    ], (230, 240, 250)),
    "history": (PKG + ".HistoryActivity", [
        node("LinearLayout", (0, 0, 1080, 1920), children=[
            tabs(),
            node("ListView", (0, 210, 1080, 1920), children=[
                node("TextView", (0, 210, 1080, 370), "Fillup on Jan 5", "entry"),
                node("TextView", (0, 370, 1080, 530), "Fillup on Feb 9", "entry"),
            ]),
        ]),
    ], (235, 250, 235)),
    "statistics": (PKG + ".StatisticsActivity", [
        node("LinearLayout", (0, 0, 1080, 1920), children=[
            tabs(),
            node("TextView", (40, 260, 1040, 360), "Average fuel economy"),
            node("TextView", (40, 360, 1040, 460), "NaN", "avg_economy"),
            node("TextView", (40, 500, 1040, 600), "Total distance"),
            node("TextView", (40, 640, 1040, 740), "Total cost"),
        ]),
    ], (250, 240, 225)),
    "detail": (PKG + ".FillupDetailActivity", [
        node("RelativeLayout", (0, 0, 1080, 1920), children=[
            node("TextView", (40, 100, 1040, 220), "Fillup details", "title"),
            node("Button", (40, 1700, 520, 1820), "Delete", "delete_btn"),
            node("Button", (560, 1700, 1040, 1820), "Close", "close_btn"),
        ]),
    ], (245, 235, 245)),
}


def find(screen, label=None, id_name=None):
    stack = list(SCREENS[screen][1])
    while stack:
        n = stack.pop(0)
        if (label and n.get("label") == label) or (id_name and n.get("id_name") == id_name):
            return n
        stack[:0] = n.get("children", [])
    raise KeyError((screen, label, id_name))


def screen_doc(name):
    activity, comps, _ = SCREENS[name]
    return {"activity": activity, "components": comps}


def step_png(src, action, target):
    key = target.get("label") or target.get("id_name") if target else "screen"
    return "steps/{}_{}_{}.png".format(src, action.lower(), key.lower().replace(" ", "_"))


def event(src, dst, action, label=None, id_name=None, text=None):
    comp = find(src, label, id_name) if (label or id_name) else None
    e = {
        "action": action,
        "source_screen": screen_doc(src),
        "result_screen": screen_doc(dst),
        "screenshot": "screens/{}.png".format(src),
        "annotated_screenshot": step_png(src, action, comp),
    }
    if comp is not None:
        e["component"] = comp
    if text is not None:
        e["input_text"] = text
    return e


def launch():
    return event("launcher", "fillup", "LAUNCH")


TRACE_TABLE = {
    "h01_add_fillup": ("human", [
        launch(),
        event("fillup", "fillup", "TYPE", id_name="price_per_unit", text="3.49"),
        event("fillup", "fillup", "TYPE", id_name="volume", text="12.5"),
        event("fillup", "fillup", "TYPE", id_name="odometer", text="15000"),
        event("fillup", "fillup", "TAP", label="Save Fillup"),
        event("fillup", "statistics", "TAP", label="Statistics"),
    ]),
    "h02_browse_history": ("human", [
        launch(),
        event("fillup", "history", "TAP", label="History"),
        event("history", "detail", "TAP", label="Fillup on Jan 5"),
        event("detail", "history", "BACK"),
        event("history", "statistics", "TAP", label="Statistics"),
    ]),
    "h03_delete_fillup": ("human", [
        launch(),
        event("fillup", "history", "TAP", label="History"),
        event("history", "detail", "TAP", label="Fillup on Feb 9"),
        event("detail", "history", "TAP", label="Delete"),
        event("history", "fillup", "TAP", label="Fillup"),
        event("fillup", "fillup", "TYPE", id_name="price_per_unit", text="3.59"),
        event("fillup", "fillup", "TAP", label="Save Fillup"),
    ]),
    "a01_explore": ("automated", [
        launch(),
        event("fillup", "statistics", "TAP", label="Statistics"),
        event("statistics", "history", "TAP", label="History"),
        event("history", "history", "LONG_TAP", label="Fillup on Jan 5"),
        event("history", "fillup", "TAP", label="Fillup"),
        event("fillup", "fillup", "TAP", label="Partial tank"),
        event("fillup", "fillup", "ROTATE"),
        event("fillup", "history", "TAP", label="History"),
        event("history", "detail", "TAP", label="Fillup on Jan 5"),
        event("detail", "history", "TAP", label="Close"),
    ]),
}


def png(width, height, rgb, highlight=None):
    rows = []
    for y in range(height):
        row = bytearray([0])
        for x in range(width):
            inside = highlight and highlight[0] <= x < highlight[2] and highlight[1] <= y < highlight[3]
            row += bytes((220, 40, 40) if inside else rgb)
        rows.append(bytes(row))

    def chunk(tag, data):
        return struct.pack(">I", len(data)) + tag + data + struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF)

    ihdr = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", ihdr) + chunk(b"IDAT", zlib.compress(b"".join(rows), 9)) + chunk(b"IEND", b"")


def write(path, data):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "wb") as f:
        f.write(data)


def main():
    scale = 10
    for tid, (source, events) in TRACE_TABLE.items():
        doc = {"app": APP, "source": source, "events": events}
        write(os.path.join(TRACES, tid + ".json"), (json.dumps(doc, indent=2) + "\n").encode())
        for e in events:
            src = e["screenshot"].split("/")[1][:-4]
            rgb = SCREENS[src][2]
            write(os.path.join(ASSETS, e["screenshot"]), png(108, 192, rgb))
            hl = None
            if "component" in e:
                b = e["component"]["bounds"]
                hl = (b[0] // scale, b[1] // scale, max(b[2] // scale, b[0] // scale + 1), max(b[3] // scale, b[1] // scale + 1))
            write(os.path.join(ASSETS, e["annotated_screenshot"]), png(108, 192, rgb, hl))
    write(os.path.join(ASSETS, "icon.png"), png(48, 48, (30, 120, 200)))


if __name__ == "__main__":
    main()
