"""Shared formula fixtures."""

RAW_88 = ("-exists x5.(_biker(x5) & exists e6.(_jump(e6) & (subj(e6) = x5) & "
          "exists x7.(_air(x7) & _in(e6,x7))))")
PRENEX_88 = ("-exists e1 x2 x3.(biker(x2) & jump(e1) & (subj(e1) = x2) & air(x3) & "
             "in(e1,x3))")
RAW_55 = ("exists x4.(_boy(x4) & _three(x4) & exists e5.(_jump(e5) & (subj(e5) = x4) & "
          "exists x6.(_leaf(x6) & _in(e5,x6))))")
PRENEX_55 = ("exists e1 x2 x3.(boy(x2) & three(x2) & jump(e1) & (subj(e1) = x2) & "
             "leaf(x3) & in(e1,x3))")

G1 = "exists e.jump(e)"
P1 = "exists e.(jump(e) & high(e))"
G2 = "exists e x.(eat(e) & (subj(e)=x))"
P2 = "exists e x.(eat(e) & (obj(e)=x))"

GOLD_230 = "-exists e1 e2 x3.(child(x3) & play(e1) & (subj(e1) = x3) & wait(e2) & (subj(e2) = x3))"
PRED_230 = "-exists e1 x2 x3.(child(x2) & play(e1) & (subj(e1) = x2) & wait(e1))"
GOLD_2872 = ("exists e1 x2 x3.(man(x2) & bull(x3) & mechanical(x3) & ride(e1) & "
             "(subj(e1) = x2) & (obj(e1) = x3))")
PRED_2872 = ("exists e1 x2 x3 x4.(man(x2) & bull(x3) & mechanical(x4) & ride(e1) & "
             "(subj(e1) = x2) & (obj(e1) = x3))")

GOLD_706 = ("exists e1 e2 x3 x4 x5 x6.(man(x3) & sit(e1) & (subj(e1) = x3) & comfortably(e1) & "
            "bench(x4) & on(e1,x4) & woman(x5) & sit(e2) & (subj(e2) = x5) & comfortably(e2) & "
            "bench(x6) & on(e2,x6))")
