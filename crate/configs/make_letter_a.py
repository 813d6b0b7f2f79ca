"""Writes letter_a.pgm: a dark capital A on a white 128x128 canvas."""

from pathlib import Path

from PIL import Image, ImageDraw

SIZE = 128


def main() -> None:
    img = Image.new("L", (SIZE, SIZE), 255)
    d = ImageDraw.Draw(img)
    apex, left, right = (64, 18), (26, 110), (102, 110)
    stroke = 14
    d.line([left, apex], fill=0, width=stroke)
    d.line([apex, right], fill=0, width=stroke)
    d.line([(42, 76), (86, 76)], fill=0, width=stroke - 2)
    img.save(Path(__file__).with_name("letter_a.pgm"))


if __name__ == "__main__":
    main()
