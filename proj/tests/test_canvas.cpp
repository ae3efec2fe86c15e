#include <gtest/gtest.h>

#include <percept/canvas.hpp>

#include "geometry.hpp"

using namespace percept;

TEST(Raster, HorizontalLineCoversOneCellPerColumn) {
    Canvas c;
    raster::line(c, Point{10, 50}, Point{59, 50});
    EXPECT_EQ(c.count(), 50u);
    for (int x = 10; x <= 59; ++x) EXPECT_EQ(c.at(x, 50), 1);
}

TEST(Raster, ZeroLengthLineIsOnePixel) {
    Canvas c;
    raster::line(c, Point{5, 5}, Point{5, 5});
    EXPECT_EQ(c.count(), 1u);
    EXPECT_EQ(c.at(5, 5), 1);
}

TEST(Raster, FilledRectangle) {
    Canvas c;
    raster::fill_rect(c, Box{0, 0, 9, 9});
    EXPECT_EQ(c.count(), 100u);
}

TEST(Raster, RectOutlineCounts) {
    Canvas c;
    raster::rect_outline(c, Box{10, 10, 19, 29});
    EXPECT_EQ(c.count(), 2u * 10 + 2u * 18);
    Canvas thick;
    raster::rect_outline(thick, Box{10, 10, 19, 29}, 2);
    EXPECT_EQ(thick.count(), 10u * 20 - 6u * 16);
}

TEST(Raster, WideLineExtendsAlongMinorAxis) {
    Canvas c;
    raster::line(c, Point{50, 10}, Point{50, 40}, 3);
    EXPECT_EQ(c.count(), 31u * 3);
    EXPECT_EQ(probe::set_bounds(c), (Box{50, 10, 52, 40}));
}

TEST(Raster, DiagonalLineIsConnected) {
    Canvas c;
    raster::line(c, Point{0, 0}, Point{30, 17});
    EXPECT_EQ(c.count(), 31u);  // one cell per major-axis step
    EXPECT_EQ(c.at(0, 0), 1);
    EXPECT_EQ(c.at(30, 17), 1);
}

TEST(Raster, ZeroRadiusArcIsCentre) {
    Canvas c;
    raster::arc(c, PointF{20, 20}, 0.0, 0.0, 90.0);
    EXPECT_EQ(c.count(), 1u);
    EXPECT_EQ(c.at(20, 20), 1);
}

TEST(Raster, CircleIsSymmetricAndOnRadius) {
    Canvas c;
    raster::circle(c, PointF{50, 50}, 30);
    EXPECT_GT(c.count(), 150u);
    for (int y = 0; y < 100; ++y)
        for (int x = 0; x < 100; ++x)
            if (c.at(x, y)) {
                const double r = std::hypot(x - 50.0, y - 50.0);
                EXPECT_NEAR(r, 30.0, 1.5) << x << "," << y;
            }
    EXPECT_EQ(c.at(80, 50), 1);
    EXPECT_EQ(c.at(20, 50), 1);
    EXPECT_EQ(c.at(50, 20), 1);
    EXPECT_EQ(c.at(50, 80), 1);
}

TEST(Raster, PolarIsCounterClockwiseWithRowsDown) {
    const auto p = raster::polar(PointF{50, 50}, 10, 90);
    EXPECT_NEAR(p.x, 50.0, 1e-12);
    EXPECT_NEAR(p.y, 40.0, 1e-12);
}

TEST(Raster, SectorIncludesBothRadii) {
    Canvas c;
    raster::sector(c, PointF{50, 50}, 20, 0, 90);
    EXPECT_EQ(c.at(70, 50), 1);
    EXPECT_EQ(c.at(50, 30), 1);
    EXPECT_EQ(c.at(60, 50), 1);
    EXPECT_EQ(c.at(50, 40), 1);
}

TEST(Raster, QuadraticPassesThroughEndpointsAndIsConnected) {
    Canvas c;
    raster::quadratic(c, PointF{20, 70}, PointF{50, 10}, PointF{80, 70});
    EXPECT_EQ(c.at(20, 70), 1);
    EXPECT_EQ(c.at(80, 70), 1);
    // 8-connected: every set cell except the endpoints has a set neighbour.
    for (int y = 0; y < 100; ++y)
        for (int x = 0; x < 100; ++x) {
            if (!c.at(x, y)) continue;
            int nb = 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) nb += (dx || dy) && c.at(x + dx, y + dy);
            EXPECT_GE(nb, 1);
        }
    // Apex of a control offset of 60 is 30 rows above the chord.
    EXPECT_EQ(probe::set_bounds(c).y0, 40);
}

TEST(Raster, ClipsOutsideCanvas) {
    Canvas c;
    raster::line(c, Point{-10, 5}, Point{9, 5});
    EXPECT_EQ(c.count(), 10u);
    raster::fill_rect(c, Box{95, 95, 120, 120});
    EXPECT_EQ(c.count(), 35u);
}

TEST(Raster, Idempotent) {
    Canvas a, b;
    raster::circle(a, PointF{40, 40}, 12);
    raster::circle(b, PointF{40, 40}, 12);
    raster::circle(b, PointF{40, 40}, 12);
    EXPECT_EQ(a, b);
}

TEST(Raster, DotsAnchorBottomLeftOrCentre) {
    Canvas c;
    raster::dot(c, Point{10, 10}, 3);
    EXPECT_EQ(probe::set_bounds(c), (Box{10, 8, 12, 10}));
    Canvas d;
    raster::centered_dot(d, Point{10, 10}, 3);
    EXPECT_EQ(probe::set_bounds(d), (Box{9, 9, 11, 11}));
}

TEST(CanvasTest, BinaryCells) {
    Canvas c;
    raster::fill_rect(c, Box{0, 0, 99, 99});
    raster::fill_rect(c, Box{0, 0, 99, 99});
    for (auto v : c.cells()) EXPECT_TRUE(v == 0 || v == 1);
    EXPECT_EQ(c.count(), 10000u);
}
